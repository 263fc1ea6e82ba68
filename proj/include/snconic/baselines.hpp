#pragma once

#include "snconic/gamma_estimation.hpp"
#include "snconic/solver.hpp"

namespace snconic::baselines {

// min (1/(2n))||y - X beta||^2 + lambda ||beta||_1 by cyclic coordinate descent;
// converged when the max coordinate change over a sweep is < tol.
RealVector lasso(const RealMatrix& X, const RealVector& y, double lambda, long max_sweeps = 100000,
                 double tol = 1e-8);

// Default tuning c * sigma * quantile(1 - alpha/(2p)) / sqrt(n) for the objective above.
double lasso_default_lambda(Index n, Index p, double alpha = 0.05, double c = 1.1,
                            double sigma = 1.0);

// min ||beta||_1 s.t. ||X'(y - X beta)/n||_inf <= lambda, as a pure LP.
RealVector dantzig(const RealMatrix& X, const RealVector& y, double lambda,
                   const solver::SolverSettings& settings = {});

double dantzig_default_lambda(Index n, Index p);

// min ||beta||_1 + lambda r  s.t.  ||Z'(y - Z beta)/n + Gamma beta||_inf <= mu r + tau,
// ||beta||_2 <= r, with tau = sigma_xi * sqrt(log(p/epsilon)/n).
// mu defaults (NaN) to sqrt(log(p/epsilon)/n).
RealVector brt_conic(const Dataset& dataset, const GammaEstimate& gamma, double sigma_xi,
                     double epsilon = 0.05,
                     double mu = std::numeric_limits<double>::quiet_NaN(), double lambda = 1.0,
                     const solver::SolverSettings& settings = {});

}  // namespace snconic::baselines
