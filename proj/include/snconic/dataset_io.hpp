#pragma once

#include "snconic/types.hpp"

namespace snconic::io {

// Dataset CSV: header "y,z1,...,zp"; optional mask CSV of 0/1 with one
// column per covariate. Masked-out Z entries must be stored as 0.
Dataset read_dataset_csv(const std::string& data_path, const std::string& mask_path = "");
void write_dataset_csv(const Dataset& dataset, const std::string& data_path,
                       const std::string& mask_path = "");

// Plain numeric matrix CSV with header "c1,...,cp".
RealMatrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const RealMatrix& m, const std::string& path);

// GammaEstimate JSON: {"diag": [...], "b_eps": r, "eps": r}.
GammaEstimate read_gamma_json(const std::string& path);
void write_gamma_json(const GammaEstimate& gamma, const std::string& path);

}  // namespace snconic::io
