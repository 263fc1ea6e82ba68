#pragma once

#include "snconic/cone.hpp"
#include "snconic/types.hpp"

#include <Eigen/SparseCore>

namespace snconic::solver {

// Standard form:  min c'theta  s.t.  A theta + nu = b,  nu in K,
// K the ordered product of the cone list. A stored as COO triplets.
struct ConicProgram {
  Index num_vars = 0;                           // d
  Index num_rows = 0;                           // m = sum of cone dims
  RealVector objective;                         // length d
  std::vector<Eigen::Triplet<double>> entries;  // COO, no explicit zeros
  RealVector rhs;                               // length m
  std::vector<ConeSpec> cones;

  void validate() const;
  Eigen::SparseMatrix<double> matrix() const;  // m x d, duplicates summed
};

// Plain-text problem dump, one record per line; round-trips exactly.
void write_program_file(const ConicProgram& program, const std::string& path);
ConicProgram read_program_file(const std::string& path);

}  // namespace snconic::solver
