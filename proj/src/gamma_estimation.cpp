#include "snconic/gamma_estimation.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace snconic::gammaest {

GammaEstimate known_additive(double sigma_w, Index p) {
  if (p < 1) throw std::invalid_argument("known_additive: p < 1");
  if (!(sigma_w >= 0.0) || !std::isfinite(sigma_w))
    throw std::invalid_argument("known_additive: sigma_w must be >= 0");
  GammaEstimate gamma;
  gamma.diag = RealVector::Constant(p, sigma_w * sigma_w);
  gamma.b_eps = 0.0;
  gamma.validate();
  return gamma;
}

MarResult mar_estimate(const Dataset& raw, double eps, double c_beps) {
  raw.validate();
  if (!raw.mask) throw std::invalid_argument("mar_estimate: dataset has no mask");
  if (!(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("mar_estimate: eps not in (0,1)");
  if (!(c_beps >= 0.0)) throw std::invalid_argument("mar_estimate: c_beps < 0");
  const Index n = raw.n();
  const Index p = raw.p();

  MarResult out;
  out.pi_hat = RealVector::Zero(p);
  out.gamma.diag = RealVector::Zero(p);
  out.gamma.eps = eps;
  out.surrogate.y = raw.y;
  out.surrogate.Z = raw.Z;
  out.surrogate.mask = raw.mask;
  out.surrogate.provenance = Provenance::MissingAtRandom;

  for (Index j = 0; j < p; ++j) {
    const double observed = raw.mask->col(j).sum();
    const double pi = 1.0 - observed / static_cast<double>(n);
    if (observed == 0.0)
      throw std::invalid_argument("mar_estimate: column " + std::to_string(j) +
                                  " is fully missing");
    if (pi > 0.95)
      std::cerr << "warning: column " << j << " is " << 100.0 * pi << "% missing\n";
    out.pi_hat[j] = pi;
    const double keep = 1.0 - pi;
    out.surrogate.Z.col(j) /= keep;
    const double second_moment = raw.Z.col(j).squaredNorm() / static_cast<double>(n);
    out.gamma.diag[j] = pi / (keep * keep) * second_moment;
  }
  out.gamma.b_eps =
      c_beps * std::sqrt(std::log(2.0 * static_cast<double>(p) / eps) / static_cast<double>(n));
  out.gamma.validate();
  return out;
}

GammaEstimate load_external(const RealVector& diag, double b_eps, double eps) {
  GammaEstimate gamma;
  gamma.diag = diag;
  gamma.b_eps = b_eps;
  gamma.eps = eps;
  gamma.validate();
  return gamma;
}

}  // namespace snconic::gammaest
