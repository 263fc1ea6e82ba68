#pragma once

// Independent reference implementations used only by tests. Each oracle
// recomputes a library quantity through a different algorithm (series,
// bisection, golden section, exhaustive enumeration, long-run first-order
// methods, plain loops) so that agreement between the two is meaningful.

#include "snconic/conic_program.hpp"
#include "snconic/types.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace snconic::oracles {

// ------------------------------------------------------------- normal CDF

// erf(z) = (2/sqrt(pi)) z e^{-z^2} sum_{k>=0} (2z^2)^k / (2k+1)!!,
// an all-positive series, so long double evaluation has no cancellation.
inline long double erf_series(long double z) {
  const long double two_over_sqrt_pi = 1.128379167095512573896158903121545172L;
  const long double z2 = 2.0L * z * z;
  long double term = 1.0L, sum = 1.0L;
  for (int k = 1; k < 4000; ++k) {
    term *= z2 / static_cast<long double>(2 * k + 1);
    sum += term;
    if (term < sum * 1e-22L) break;
  }
  return two_over_sqrt_pi * z * std::exp(-z * z) * sum;
}

// erfc(z) ~ e^{-z^2} / (z sqrt(pi)) sum_k (-1)^k (2k-1)!! / (2z^2)^k,
// truncated at the smallest term; adequate deep in the tail only.
inline long double erfc_asymptotic(long double z) {
  const long double inv_sqrt_pi = 0.564189583547756286948079451560772586L;
  long double term = 1.0L, sum = 1.0L;
  int sign = -1;
  for (int k = 1; k < 200; ++k) {
    const long double next = term * static_cast<long double>(2 * k - 1) / (2.0L * z * z);
    if (next >= term) break;
    term = next;
    sum += sign * term;
    sign = -sign;
  }
  return std::exp(-z * z) / z * inv_sqrt_pi * sum;
}

inline double normal_cdf(double x) {
  const long double sqrt2 = 1.414213562373095048801688724209698079L;
  const long double z = std::fabs(static_cast<long double>(x)) / sqrt2;
  const long double upper =
      std::fabs(x) > 6.0 ? 0.5L * erfc_asymptotic(z) : 0.5L * (1.0L - erf_series(z));
  return static_cast<double>(x >= 0 ? 1.0L - upper : upper);
}

inline double normal_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("oracle quantile: q outside (0,1)");
  double lo = -40.0, hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ----------------------------------------------------- SOC projection

// Projection onto {(s, x): ||x|| <= s}. Outside the cone the projection lies
// on a boundary ray (r, r x/||x||) with r >= 0; find r by bisecting the sign
// of the distance derivative (r - s) + (r - ||x||) rather than trusting the
// library's closed form, then compare against the zero point.
inline RealVector soc_project(const RealVector& v) {
  const Index d = v.size();
  if (d < 2) throw std::invalid_argument("oracle soc_project: dim >= 2 required");
  const double s = v(0);
  const double nx = v.tail(d - 1).norm();
  if (nx <= s) return v;

  RealVector best = RealVector::Zero(d);
  double best_d2 = v.squaredNorm();
  if (nx > 0) {
    const auto deriv = [&](double r) { return (r - s) + (r - nx); };
    double r = 0.0;
    if (deriv(0.0) < 0.0) {
      double lo = 0.0, hi = nx + std::fabs(s) + 1.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (deriv(mid) < 0.0 ? lo : hi) = mid;
      }
      r = 0.5 * (lo + hi);
    }
    const double d2 = (r - s) * (r - s) + (r - nx) * (r - nx);
    if (d2 < best_d2) {
      best_d2 = d2;
      best(0) = r;
      best.tail(d - 1) = v.tail(d - 1) * (r / nx);
    }
  }
  return best;
}

// ----------------------------------------------------- vertex-enumeration LP

struct VertexLpResult {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
  RealVector x;
};

// min c'x s.t. A_ub x <= b_ub, A_eq x = b_eq by enumerating all basic points:
// every equality row active plus enough inequality rows to square the system.
// Only valid when the feasible set is pointed (has vertices), as in the tests.
inline VertexLpResult lp_vertex_enumeration(const RealMatrix& A_ub, const RealVector& b_ub,
                                            const RealMatrix& A_eq, const RealVector& b_eq,
                                            const RealVector& c, double feas_tol = 1e-9) {
  const Index d = c.size();
  const Index n_eq = A_eq.rows();
  const Index n_ub = A_ub.rows();
  const Index pick = d - n_eq;
  if (pick < 0 || pick > n_ub)
    throw std::invalid_argument("oracle lp: cannot form a basis from the given rows");

  VertexLpResult best;
  std::vector<Index> combo(static_cast<std::size_t>(pick));
  for (Index j = 0; j < pick; ++j) combo[static_cast<std::size_t>(j)] = j;
  while (true) {
    RealMatrix B(d, d);
    RealVector rhs(d);
    if (n_eq > 0) {
      B.topRows(n_eq) = A_eq;
      rhs.head(n_eq) = b_eq;
    }
    for (Index j = 0; j < pick; ++j) {
      B.row(n_eq + j) = A_ub.row(combo[static_cast<std::size_t>(j)]);
      rhs(n_eq + j) = b_ub(combo[static_cast<std::size_t>(j)]);
    }
    const Eigen::FullPivLU<RealMatrix> lu(B);
    if (lu.isInvertible()) {
      const RealVector x = lu.solve(rhs);
      const double scale = 1.0 + x.cwiseAbs().maxCoeff();
      if (n_ub == 0 || ((A_ub * x - b_ub).maxCoeff() <= feas_tol * scale)) {
        const double obj = c.dot(x);
        if (obj < best.objective) {
          best.feasible = true;
          best.objective = obj;
          best.x = x;
        }
      }
    }
    if (pick == 0) break;
    Index i = pick - 1;
    while (i >= 0 && combo[static_cast<std::size_t>(i)] == n_ub - pick + i) --i;
    if (i < 0) break;
    ++combo[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < pick; ++j)
      combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
  }
  return best;
}

// min ||beta||_1 s.t. ||X'(y - X beta)/n||_inf <= lambda, posed over
// (beta+, beta-) >= 0 and handed to the vertex enumerator.
inline VertexLpResult dantzig_vertex(const RealMatrix& X, const RealVector& y, double lambda) {
  const Index n = X.rows(), p = X.cols();
  const RealMatrix G = X.transpose() * X / static_cast<double>(n);
  const RealVector q = X.transpose() * y / static_cast<double>(n);

  const Index d = 2 * p;
  RealMatrix A_ub(2 * p + d, d);
  RealVector b_ub(2 * p + d);
  A_ub.setZero();
  // |q - G(beta+ - beta-)| <= lambda
  A_ub.block(0, 0, p, p) = -G;
  A_ub.block(0, p, p, p) = G;
  b_ub.head(p) = RealVector::Constant(p, lambda) - q;
  A_ub.block(p, 0, p, p) = G;
  A_ub.block(p, p, p, p) = -G;
  b_ub.segment(p, p) = RealVector::Constant(p, lambda) + q;
  A_ub.block(2 * p, 0, d, d) = -RealMatrix::Identity(d, d);
  b_ub.tail(d).setZero();

  VertexLpResult r = lp_vertex_enumeration(A_ub, b_ub, RealMatrix(0, d), RealVector(0),
                                           RealVector::Ones(d));
  if (r.feasible) {
    RealVector beta = r.x.head(p) - r.x.tail(p);
    r.x = std::move(beta);
  }
  return r;
}

// ----------------------------------------------------- lasso by proximal gradient

inline double lasso_objective(const RealMatrix& X, const RealVector& y, const RealVector& beta,
                              double lambda) {
  const double n = static_cast<double>(X.rows());
  return (y - X * beta).squaredNorm() / (2.0 * n) + lambda * beta.lpNorm<1>();
}

// Long-run proximal gradient on (1/(2n))||y - X beta||^2 + lambda ||beta||_1.
inline RealVector lasso_proximal_gradient(const RealMatrix& X, const RealVector& y, double lambda,
                                          long iters = 400000) {
  const Index n = X.rows(), p = X.cols();
  const RealMatrix G = X.transpose() * X / static_cast<double>(n);
  const RealVector q = X.transpose() * y / static_cast<double>(n);
  const double L =
      Eigen::SelfAdjointEigenSolver<RealMatrix>(G).eigenvalues().maxCoeff() + 1e-12;
  RealVector beta = RealVector::Zero(p);
  for (long it = 0; it < iters; ++it) {
    const RealVector step = beta - (G * beta - q) / L;
    RealVector next(p);
    for (Index j = 0; j < p; ++j) {
      const double a = std::fabs(step(j)) - lambda / L;
      next(j) = a > 0 ? (step(j) > 0 ? a : -a) : 0.0;
    }
    const double change = (next - beta).lpNorm<Eigen::Infinity>();
    beta = next;
    if (change < 1e-15) break;
  }
  return beta;
}

// ----------------------------------------------------- plain-loop score pieces

inline RealVector score_loops(const RealVector& beta, const RealVector& y, const RealMatrix& Z,
                              const RealVector& gamma_diag) {
  const Index n = Z.rows(), p = Z.cols();
  RealVector s(p);
  for (Index j = 0; j < p; ++j) {
    double acc = 0;
    for (Index i = 0; i < n; ++i) {
      double resid = y(i);
      for (Index k = 0; k < p; ++k) resid -= Z(i, k) * beta(k);
      acc += Z(i, j) * resid;
    }
    s(j) = acc / static_cast<double>(n) + gamma_diag(j) * beta(j);
  }
  return s;
}

inline RealVector t_loops(const RealVector& beta, const RealVector& y, const RealMatrix& Z,
                          const RealVector& gamma_diag) {
  const Index n = Z.rows(), p = Z.cols();
  RealVector t(p);
  for (Index j = 0; j < p; ++j) {
    double acc = 0;
    for (Index i = 0; i < n; ++i) {
      double resid = y(i);
      for (Index k = 0; k < p; ++k) resid -= Z(i, k) * beta(k);
      const double term = Z(i, j) * resid + gamma_diag(j) * beta(j);
      acc += term * term;
    }
    t(j) = std::sqrt(acc / static_cast<double>(n));
  }
  return t;
}

// max_{j,k,l} |(1/n) sum_i (z_ij z_ik - G_jk)(z_ij z_il - G_jl)|^{1/2} with
// diagonal G; cubic loops, usable only for tiny instances.
inline double hn_naive(const RealMatrix& Z, const RealVector& gamma_diag) {
  const Index n = Z.rows(), p = Z.cols();
  double worst = 0;
  for (Index j = 0; j < p; ++j)
    for (Index k = 0; k < p; ++k)
      for (Index l = 0; l < p; ++l) {
        double acc = 0;
        for (Index i = 0; i < n; ++i) {
          const double ak = Z(i, j) * Z(i, k) - (k == j ? gamma_diag(j) : 0.0);
          const double al = Z(i, j) * Z(i, l) - (l == j ? gamma_diag(j) : 0.0);
          acc += ak * al;
        }
        worst = std::max(worst, std::fabs(acc / static_cast<double>(n)));
      }
  return std::sqrt(worst);
}

// ----------------------------------------------------- reduced objective / grid fit

// Value of ||beta||_1 + lambda_t ||t||_inf + lambda_u ||u||_inf minimized over
// the (t, u) feasible for this beta. Exact only when b_eps = 0, where the
// minimum sits at u_j = |beta_j| and t_j = max(t_j(beta), |score_j(beta)|/tau).
inline double reduced_objective(const RealVector& beta, const RealVector& y, const RealMatrix& Z,
                                const RealVector& gamma_diag, double tau, double lambda_t,
                                double lambda_u) {
  const RealVector s = score_loops(beta, y, Z, gamma_diag);
  const RealVector t = t_loops(beta, y, Z, gamma_diag);
  double t_inf = 0, u_inf = 0;
  for (Index j = 0; j < beta.size(); ++j) {
    t_inf = std::max(t_inf, std::max(t(j), std::fabs(s(j)) / tau));
    u_inf = std::max(u_inf, std::fabs(beta(j)));
  }
  return beta.lpNorm<1>() + lambda_t * t_inf + lambda_u * u_inf;
}

struct GridFit {
  double beta = 0;
  double objective = std::numeric_limits<double>::infinity();
};

// One-covariate estimator by grid search with repeated refinement.
inline GridFit grid_fit_1d(const RealVector& y, const RealMatrix& Z, double gamma_diag, double tau,
                           double lambda_t, double lambda_u, double radius = 5.0) {
  if (Z.cols() != 1) throw std::invalid_argument("grid_fit_1d: p must be 1");
  RealVector gd(1);
  gd(0) = gamma_diag;
  double center = 0.0, half = radius;
  GridFit best;
  for (int pass = 0; pass < 8; ++pass) {
    const int points = 400;
    for (int g = 0; g <= points; ++g) {
      RealVector beta(1);
      beta(0) = center - half + 2.0 * half * g / points;
      const double obj = reduced_objective(beta, y, Z, gd, tau, lambda_t, lambda_u);
      if (obj < best.objective) {
        best.objective = obj;
        best.beta = beta(0);
      }
    }
    center = best.beta;
    half = 4.0 * half / points;
  }
  return best;
}

// ----------------------------------------------------- synthetic KKT programs

struct SyntheticKkt {
  solver::ConicProgram program;
  RealVector theta_star;
  double objective_star = 0;
};

// Builds a random feasible program backwards from a complementary primal-dual
// pair: pick theta*, nu* in K and dual* in K* with nu* complementary to dual*,
// then set b = A theta* + nu* and c = -A' dual*. The optimum value is c'theta*.
template <typename Rng>
SyntheticKkt make_synthetic_kkt(Rng&& normal, Index d, Index n_zero, Index n_nonneg,
                                Index soc_dim) {
  SyntheticKkt out;
  solver::ConicProgram& prog = out.program;
  const Index m = n_zero + n_nonneg + soc_dim;
  prog.num_vars = d;
  prog.num_rows = m;
  prog.cones.clear();
  if (n_zero > 0) prog.cones.push_back({solver::ConeKind::Zero, n_zero});
  if (n_nonneg > 0) prog.cones.push_back({solver::ConeKind::NonNeg, n_nonneg});
  if (soc_dim > 0) prog.cones.push_back({solver::ConeKind::SecondOrder, soc_dim});

  RealMatrix A(m, d);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < d; ++j) A(i, j) = normal();
  out.theta_star = RealVector::Zero(d);
  for (Index j = 0; j < d; ++j) out.theta_star(j) = normal();

  RealVector nu = RealVector::Zero(m);
  RealVector dual = RealVector::Zero(m);
  Index at = n_zero;
  for (Index i = 0; i < n_zero; ++i) dual(i) = normal();  // dual of {0} is free
  for (Index i = 0; i < n_nonneg; ++i) {
    // strict complementarity: one side positive, the other zero
    if (normal() > 0)
      nu(at + i) = 1.0 + std::fabs(normal());
    else
      dual(at + i) = 1.0 + std::fabs(normal());
  }
  at += n_nonneg;
  if (soc_dim > 0) {
    // nu on the cone boundary, dual on the polar ray: (r, w) and a(r, -w)
    RealVector w(soc_dim - 1);
    for (Index i = 0; i < soc_dim - 1; ++i) w(i) = normal();
    const double r = w.norm();
    nu(at) = r;
    nu.segment(at + 1, soc_dim - 1) = w;
    const double a = 0.5 + std::fabs(normal());
    dual(at) = a * r;
    dual.segment(at + 1, soc_dim - 1) = -a * w;
  }

  prog.rhs = A * out.theta_star + nu;
  prog.objective = -A.transpose() * dual;
  prog.entries.clear();
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < d; ++j)
      if (A(i, j) != 0.0) prog.entries.emplace_back(i, j, A(i, j));
  out.objective_star = prog.objective.dot(out.theta_star);
  return out;
}

}  // namespace snconic::oracles
