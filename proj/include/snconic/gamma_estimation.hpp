#pragma once

#include "snconic/types.hpp"

namespace snconic::gammaest {

// Known additive noise level: diag = sigma_w^2, b_eps = 0.
GammaEstimate known_additive(double sigma_w, Index p);

struct MarResult {
  Dataset surrogate;   // z / (1 - pi_hat_j), columnwise
  GammaEstimate gamma;
  RealVector pi_hat;   // per-column fraction of missing entries
};

// Missing-at-random bias correction from the 0/1 mask.
// pi_hat_j = fraction of zeros in mask column j; Gamma_jj = pi/(1-pi)^2 * mean(ztilde^2);
// b_eps = c_beps * sqrt(log(2p/eps)/n). A fully missing column is an error.
MarResult mar_estimate(const Dataset& raw, double eps = 0.05, double c_beps = 0.25);

// Validated passthrough for externally supplied diagonals.
GammaEstimate load_external(const RealVector& diag, double b_eps, double eps);

}  // namespace snconic::gammaest
