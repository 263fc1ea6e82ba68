#pragma once

#include "snconic/types.hpp"

namespace snconic::mathcore {

enum class Norm { L1, L2, Linf, L0 };

// Standard normal CDF, accurate in both tails.
double normal_cdf(double x);

// Standard normal density.
double normal_pdf(double x);

// Inverse standard normal CDF; relative error <= 1e-9 on (0,1).
// Throws std::domain_error outside (0,1).
double std_normal_quantile(double prob);

// lq norm with q in {1,2,inf,0}; L0 counts exactly-nonzero entries.
double lq_norm(const RealVector& v, Norm q);

// {1-Phi(a)}*exp(2*a^2*gamma) - {1-Phi(a/(1+gamma))}; >= 0 for a >= 1, gamma > 0.
double gaussian_tail_bound_gap(double a, double gamma);

}  // namespace snconic::mathcore
