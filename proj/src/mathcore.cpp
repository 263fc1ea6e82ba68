#include "snconic/mathcore.hpp"

#include <cmath>

namespace snconic {

void require_finite(const RealVector& v, const std::string& what) {
  if (!v.allFinite()) throw std::invalid_argument(what + ": non-finite entry");
}

void require_finite(const RealMatrix& m, const std::string& what) {
  if (!m.allFinite()) throw std::invalid_argument(what + ": non-finite entry");
}

void Dataset::validate() const {
  if (Z.rows() < 1 || Z.cols() < 1) throw std::invalid_argument("dataset: empty design");
  if (y.size() != Z.rows()) throw std::invalid_argument("dataset: y length != rows of Z");
  require_finite(y, "dataset y");
  require_finite(Z, "dataset Z");
  if (mask) {
    if (mask->rows() != Z.rows() || mask->cols() != Z.cols())
      throw std::invalid_argument("dataset: mask shape != Z shape");
    if (((mask->array() != 0.0) && (mask->array() != 1.0)).any())
      throw std::invalid_argument("dataset: mask entries must be 0 or 1");
  }
}

void GammaEstimate::validate() const {
  if (diag.size() < 1) throw std::invalid_argument("gamma: empty diagonal");
  require_finite(diag, "gamma diagonal");
  if ((diag.array() < 0.0).any()) throw std::invalid_argument("gamma: negative diagonal entry");
  if (!(b_eps >= 0.0) || !std::isfinite(b_eps))
    throw std::invalid_argument("gamma: b_eps must be >= 0");
  if (!(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("gamma: eps must lie in (0,1)");
}

}  // namespace snconic

namespace snconic::mathcore {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt2Pi = 2.5066282746310002;

// Acklam's rational approximation for the inverse normal CDF (~1.15e-9 rel).
double quantile_initial(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;

  if (p < plow) {
    double q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p > 1 - plow) {
    double q = std::sqrt(-2 * std::log(1 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  double q = p - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}
}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

double std_normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) throw std::domain_error("std_normal_quantile: prob not in (0,1)");
  if (prob == 0.5) return 0.0;
  double x = quantile_initial(prob);
  // two Halley steps against the erfc-based CDF
  for (int it = 0; it < 2; ++it) {
    double e = normal_cdf(x) - prob;
    double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    x -= u / (1 + 0.5 * x * u);
  }
  return x;
}

double lq_norm(const RealVector& v, Norm q) {
  if (v.size() == 0) throw std::invalid_argument("lq_norm: empty vector");
  switch (q) {
    case Norm::L1:
      return v.lpNorm<1>();
    case Norm::L2:
      return v.norm();
    case Norm::Linf:
      return v.lpNorm<Eigen::Infinity>();
    case Norm::L0:
      return static_cast<double>((v.array() != 0.0).count());
  }
  throw std::invalid_argument("lq_norm: bad selector");
}

double gaussian_tail_bound_gap(double a, double gamma) {
  double upper = 0.5 * std::erfc(a / kSqrt2) * std::exp(2 * a * a * gamma);
  double tail = 0.5 * std::erfc(a / (1 + gamma) / kSqrt2);
  return upper - tail;
}

}  // namespace snconic::mathcore
