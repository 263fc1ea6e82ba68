#include "snconic/baselines.hpp"

#include "snconic/mathcore.hpp"
#include "snconic/program_builder.hpp"

#include <cmath>
#include <stdexcept>

namespace snconic::baselines {

namespace {

double soft(double v, double k) {
  if (v > k) return v - k;
  if (v < -k) return v + k;
  return 0.0;
}

RealVector truncate(RealVector beta) {
  for (Index j = 0; j < beta.size(); ++j)
    if (std::abs(beta[j]) < builder::kTruncation) beta[j] = 0.0;
  return beta;
}

}  // namespace

RealVector lasso(const RealMatrix& X, const RealVector& y, double lambda, long max_sweeps,
                 double tol) {
  if (y.size() != X.rows()) throw std::invalid_argument("lasso: y length != rows of X");
  if (!(lambda > 0.0)) throw std::invalid_argument("lasso: lambda must be > 0");
  const Index n = X.rows();
  const Index p = X.cols();
  const double dn = static_cast<double>(n);
  const RealVector colms = X.colwise().squaredNorm() / dn;
  RealVector beta = RealVector::Zero(p);
  RealVector r = y;
  for (long sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Index j = 0; j < p; ++j) {
      if (colms[j] == 0.0) continue;
      const double rho = X.col(j).dot(r) / dn + colms[j] * beta[j];
      const double next = soft(rho, lambda) / colms[j];
      const double change = next - beta[j];
      if (change != 0.0) {
        r -= change * X.col(j);
        beta[j] = next;
        max_change = std::max(max_change, std::abs(change));
      }
    }
    if (max_change < tol) break;
  }
  return beta;
}

double lasso_default_lambda(Index n, Index p, double alpha, double c, double sigma) {
  if (n < 1 || p < 1) throw std::invalid_argument("lasso_default_lambda: n, p must be >= 1");
  return c * sigma * mathcore::std_normal_quantile(1.0 - alpha / (2.0 * static_cast<double>(p))) /
         std::sqrt(static_cast<double>(n));
}

RealVector dantzig(const RealMatrix& X, const RealVector& y, double lambda,
                   const solver::SolverSettings& settings) {
  if (y.size() != X.rows()) throw std::invalid_argument("dantzig: y length != rows of X");
  if (!(lambda > 0.0)) throw std::invalid_argument("dantzig: lambda must be > 0");
  const Index n = X.rows();
  const Index p = X.cols();
  const RealMatrix G = X.transpose() * X / static_cast<double>(n);
  const RealVector q = X.transpose() * y / static_cast<double>(n);

  // variables (beta, a); min sum a_j s.t. a_j -+ beta_j >= 0, |q_j - G_j beta| <= lambda
  solver::ConicProgram program;
  program.num_vars = 2 * p;
  program.num_rows = 4 * p;
  program.objective = RealVector::Zero(2 * p);
  program.objective.tail(p).setOnes();
  program.rhs = RealVector::Zero(4 * p);
  program.cones.push_back({solver::ConeKind::NonNeg, 4 * p});
  for (Index j = 0; j < p; ++j) {
    for (bool plus : {false, true}) {
      const Index r = 2 * j + (plus ? 1 : 0);
      program.entries.emplace_back(r, p + j, -1.0);
      program.entries.emplace_back(r, j, plus ? -1.0 : 1.0);
    }
    for (bool plus : {false, true}) {
      const Index r = 2 * p + 2 * j + (plus ? 1 : 0);
      const double sign = plus ? -1.0 : 1.0;
      for (Index k = 0; k < p; ++k)
        if (G(j, k) != 0.0) program.entries.emplace_back(r, k, -sign * G(j, k));
      program.rhs[r] = lambda - sign * q[j];
    }
  }
  const solver::SolverResult result = solver::solve(program, settings);
  if (result.status == solver::SolveStatus::Infeasible ||
      result.status == solver::SolveStatus::Unbounded)
    throw std::runtime_error(std::string("dantzig: solver reported ") + to_string(result.status));
  return truncate(result.theta.head(p));
}

double dantzig_default_lambda(Index n, Index p) {
  if (n < 1 || p < 1) throw std::invalid_argument("dantzig_default_lambda: n, p must be >= 1");
  return std::sqrt(2.0 * std::log(static_cast<double>(p)) / static_cast<double>(n));
}

RealVector brt_conic(const Dataset& dataset, const GammaEstimate& gamma, double sigma_xi,
                     double epsilon, double mu, double lambda,
                     const solver::SolverSettings& settings) {
  dataset.validate();
  gamma.validate();
  if (gamma.diag.size() != dataset.p()) throw std::invalid_argument("brt_conic: gamma size != p");
  if (!(sigma_xi > 0.0)) throw std::invalid_argument("brt_conic: sigma_xi must be > 0");
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    throw std::invalid_argument("brt_conic: epsilon not in (0,1)");
  if (!(lambda > 0.0)) throw std::invalid_argument("brt_conic: lambda must be > 0");
  const Index n = dataset.n();
  const Index p = dataset.p();
  const double dn = static_cast<double>(n);
  const double tau = sigma_xi * std::sqrt(std::log(static_cast<double>(p) / epsilon) / dn);
  if (std::isnan(mu)) mu = std::sqrt(std::log(static_cast<double>(p) / epsilon) / dn);
  if (!(mu >= 0.0)) throw std::invalid_argument("brt_conic: mu must be >= 0");

  RealMatrix Gb = dataset.Z.transpose() * dataset.Z / dn;
  Gb.diagonal() -= gamma.diag;
  const RealVector q = dataset.Z.transpose() * dataset.y / dn;

  // variables (beta, a, r); min sum a_j + lambda r
  solver::ConicProgram program;
  program.num_vars = 2 * p + 1;
  program.num_rows = 4 * p + p + 1;
  program.objective = RealVector::Zero(program.num_vars);
  program.objective.segment(p, p).setOnes();
  program.objective[2 * p] = lambda;
  program.rhs = RealVector::Zero(program.num_rows);
  program.cones.push_back({solver::ConeKind::NonNeg, 4 * p});
  program.cones.push_back({solver::ConeKind::SecondOrder, p + 1});
  for (Index j = 0; j < p; ++j) {
    for (bool plus : {false, true}) {
      const Index r = 2 * j + (plus ? 1 : 0);
      program.entries.emplace_back(r, p + j, -1.0);
      program.entries.emplace_back(r, j, plus ? -1.0 : 1.0);
    }
    // mu r + tau -+ (q_j - Gb_j beta) >= 0
    for (bool plus : {false, true}) {
      const Index r = 2 * p + 2 * j + (plus ? 1 : 0);
      const double sign = plus ? -1.0 : 1.0;
      for (Index k = 0; k < p; ++k)
        if (Gb(j, k) != 0.0) program.entries.emplace_back(r, k, -sign * Gb(j, k));
      if (mu != 0.0) program.entries.emplace_back(r, 2 * p, -mu);
      program.rhs[r] = tau - sign * q[j];
    }
  }
  const Index soc = 4 * p;
  program.entries.emplace_back(soc, 2 * p, -1.0);
  for (Index j = 0; j < p; ++j) program.entries.emplace_back(soc + 1 + j, j, -1.0);

  const solver::SolverResult result = solver::solve(program, settings);
  if (result.status == solver::SolveStatus::Infeasible ||
      result.status == solver::SolveStatus::Unbounded)
    throw std::runtime_error(std::string("brt_conic: solver reported ") + to_string(result.status));
  return truncate(result.theta.head(p));
}

}  // namespace snconic::baselines
