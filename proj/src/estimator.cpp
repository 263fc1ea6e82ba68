#include "snconic/estimator.hpp"

#include "snconic/mathcore.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace snconic::estimator {

namespace {

double mean_square_column(const Dataset& dataset, Index j) {
  return dataset.Z.col(j).squaredNorm() / static_cast<double>(dataset.n());
}

builder::SnTuning resolve_tuning(const Dataset& dataset, const GammaEstimate& gamma,
                                 const SnConfig& config, double* hn_out) {
  builder::SnTuning tuning;
  tuning.tau = std::isnan(config.tau_override)
                   ? compute_tau(dataset.n(), dataset.p(), config.alpha, config.tau_scale)
                   : config.tau_override;
  tuning.b_eps = gamma.b_eps;
  if (config.lambda_mode == LambdaMode::Theoretical) {
    const double hn = compute_hn(dataset, gamma, config.hn_mode);
    if (!(hn > 0.0)) throw std::invalid_argument("fit: H_n = 0, theoretical lambda_t undefined");
    if (hn_out) *hn_out = hn;
    tuning.lambda_t = 1.0 / (4.0 * hn);
    tuning.lambda_u = 0.25;
  } else {
    tuning.lambda_t = config.lambda_t;
    tuning.lambda_u = config.lambda_u;
  }
  return tuning;
}

}  // namespace

double compute_tau(Index n, Index p, double alpha, double c) {
  if (n < 1 || p < 1) throw std::invalid_argument("compute_tau: n, p must be >= 1");
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw std::invalid_argument("compute_tau: alpha not in (0,1)");
  if (!(c > 0.0)) throw std::invalid_argument("compute_tau: c must be > 0");
  const double q = mathcore::std_normal_quantile(1.0 - alpha / (2.0 * static_cast<double>(p)));
  return c * q / std::sqrt(static_cast<double>(n));
}

RealVector score(const RealVector& beta, const Dataset& dataset, const GammaEstimate& gamma) {
  if (beta.size() != dataset.p() || gamma.diag.size() != dataset.p())
    throw std::invalid_argument("score: dimension mismatch");
  const RealVector r = dataset.y - dataset.Z * beta;
  return dataset.Z.transpose() * r / static_cast<double>(dataset.n()) +
         gamma.diag.cwiseProduct(beta);
}

RealVector t_of_beta(const RealVector& beta, const Dataset& dataset, const GammaEstimate& gamma) {
  if (beta.size() != dataset.p() || gamma.diag.size() != dataset.p())
    throw std::invalid_argument("t_of_beta: dimension mismatch");
  const Index n = dataset.n();
  const RealVector r = dataset.y - dataset.Z * beta;
  RealVector t(dataset.p());
  for (Index j = 0; j < dataset.p(); ++j) {
    const double shift = gamma.diag[j] * beta[j];
    t[j] = std::sqrt((dataset.Z.col(j).cwiseProduct(r).array() + shift).square().sum() /
                     static_cast<double>(n));
  }
  return t;
}

double compute_hn(const Dataset& dataset, const GammaEstimate& gamma, HnMode mode, Index block) {
  dataset.validate();
  gamma.validate();
  if (gamma.diag.size() != dataset.p()) throw std::invalid_argument("compute_hn: gamma size != p");
  const Index n = dataset.n();
  const Index p = dataset.p();
  const double dn = static_cast<double>(n);

  if (mode == HnMode::UpperBound) {
    const double max_fourth = dataset.Z.array().square().square().colwise().sum().maxCoeff() / dn;
    const double gmax = gamma.diag.lpNorm<Eigen::Infinity>();
    const RealMatrix gram = dataset.Z.transpose() * dataset.Z / dn;
    return std::sqrt(max_fourth + gmax * gmax + 2.0 * gmax * gram.cwiseAbs().maxCoeff());
  }

  if (block < 1) throw std::invalid_argument("compute_hn: block must be >= 1");
  double best = 0.0;
  RealMatrix weighted(n, block), gblock(p, block);
  RealVector mj(p);
  for (Index j = 0; j < p; ++j) {
    const RealVector w2 = dataset.Z.col(j).array().square().matrix();
    mj.noalias() = dataset.Z.transpose() * dataset.Z.col(j) / dn;
    const double g = gamma.diag[j];
    for (Index l0 = 0; l0 < p; l0 += block) {
      const Index width = std::min(block, p - l0);
      weighted.leftCols(width) =
          (dataset.Z.middleCols(l0, width).array().colwise() * w2.array()).matrix();
      gblock.leftCols(width).noalias() =
          dataset.Z.transpose() * weighted.leftCols(width) / dn;
      auto Mb = gblock.leftCols(width);
      // corrections from the -Gamma_jj e_j term of a_i = z_ij z_i - Gamma_jj e_j
      if (g != 0.0) {
        if (j >= l0 && j < l0 + width) Mb.col(j - l0) -= g * mj;
        Mb.row(j) -= g * mj.segment(l0, width).transpose();
        if (j >= l0 && j < l0 + width) Mb(j, j - l0) += g * g;
      }
      best = std::max(best, Mb.cwiseAbs().maxCoeff());
    }
  }
  return std::sqrt(best);
}

EstimateReport fit(const Dataset& dataset, const GammaEstimate& gamma, const SnConfig& config) {
  dataset.validate();
  gamma.validate();
  if (gamma.diag.size() != dataset.p()) throw std::invalid_argument("fit: gamma size != p");
  if (!(config.alpha > 0.0) || !(config.alpha < 1.0))
    throw std::invalid_argument("fit: alpha not in (0,1)");

  EstimateReport report;
  double hn = std::numeric_limits<double>::quiet_NaN();
  report.tuning = resolve_tuning(dataset, gamma, config, &hn);
  report.hn = hn;

  auto [program, layout] = builder::build_sn_program(dataset, gamma, report.tuning);

  // Sanity: (0, t(0)/tau, 0) is feasible by RMS dominance; the built program must agree.
  {
    const Index p = dataset.p();
    const RealVector t0 = t_of_beta(RealVector::Zero(p), dataset, gamma) / report.tuning.tau;
    const RealVector theta0 =
        builder::map_feasible_point(RealVector::Zero(p), t0, RealVector::Zero(p), dataset, layout);
    const RealVector residual = program.rhs - program.matrix() * theta0;
    const double scale = 1.0 + t0.lpNorm<Eigen::Infinity>();
    if (solver::cone_violation(residual, program.cones) > 1e-9 * scale)
      throw std::logic_error("fit: built program rejects a certifiably feasible point");
  }

  const auto start = std::chrono::steady_clock::now();
  const solver::SolverResult result = solver::solve(program, config.solver);
  report.timing_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (result.status == solver::SolveStatus::Infeasible ||
      result.status == solver::SolveStatus::Unbounded)
    throw std::runtime_error(std::string("fit: solver reported ") + to_string(result.status) +
                             " on a feasible bounded program");
  report.solver_diag.status = result.status;
  report.solver_diag.iterations = result.iterations;
  report.solver_diag.primal_residual = result.primal_residual;
  report.solver_diag.dual_residual = result.dual_residual;
  report.solver_diag.gap = result.gap;

  builder::SnPoint point = builder::extract_solution(result, layout);
  report.beta_hat = std::move(point.beta);
  report.t_hat = std::move(point.t);
  report.u_hat = std::move(point.u);

  report.threshold_values =
      threshold_values(report.beta_hat, dataset, gamma, report.tuning.tau);
  report.threshold_set.clear();
  for (Index j = 0; j < dataset.p(); ++j)
    if (std::abs(report.beta_hat[j]) > report.threshold_values[j])
      report.threshold_set.push_back(j);
  report.beta_thresholded = RealVector::Zero(dataset.p());
  for (Index j : report.threshold_set) report.beta_thresholded[j] = report.beta_hat[j];

  if (config.refit) {
    SnConfig sub = config;
    sub.refit = false;
    sub.tau_override = report.tuning.tau;
    report.beta_refit = refit(dataset, gamma, sub, report.threshold_set);
  }
  return report;
}

RealVector threshold_values(const RealVector& beta_hat, const Dataset& dataset,
                            const GammaEstimate& gamma, double tau) {
  const RealVector t = t_of_beta(beta_hat, dataset, gamma);
  RealVector nu(dataset.p());
  for (Index j = 0; j < dataset.p(); ++j) {
    const double ms = mean_square_column(dataset, j);
    if (!(ms > 0.0))
      throw std::invalid_argument("threshold: column " + std::to_string(j) + " is all zero");
    nu[j] = tau * t[j] / ms;
  }
  return nu;
}

std::vector<Index> threshold(const RealVector& beta_hat, const Dataset& dataset,
                             const GammaEstimate& gamma, double tau) {
  const RealVector nu = threshold_values(beta_hat, dataset, gamma, tau);
  std::vector<Index> set;
  for (Index j = 0; j < dataset.p(); ++j)
    if (std::abs(beta_hat[j]) > nu[j]) set.push_back(j);
  return set;
}

RealVector refit(const Dataset& dataset, const GammaEstimate& gamma, const SnConfig& config,
                 const std::vector<Index>& support) {
  RealVector embedded = RealVector::Zero(dataset.p());
  if (support.empty()) return embedded;
  for (Index j : support)
    if (j < 0 || j >= dataset.p()) throw std::invalid_argument("refit: support index out of range");

  Dataset sub;
  sub.y = dataset.y;
  sub.Z.resize(dataset.n(), static_cast<Index>(support.size()));
  sub.provenance = dataset.provenance;
  GammaEstimate gsub;
  gsub.diag.resize(static_cast<Index>(support.size()));
  gsub.b_eps = gamma.b_eps;
  gsub.eps = gamma.eps;
  for (std::size_t k = 0; k < support.size(); ++k) {
    sub.Z.col(static_cast<Index>(k)) = dataset.Z.col(support[k]);
    gsub.diag[static_cast<Index>(k)] = gamma.diag[support[k]];
  }

  SnConfig subconfig = config;
  subconfig.refit = false;
  if (std::isnan(subconfig.tau_override))
    subconfig.tau_override = compute_tau(dataset.n(), dataset.p(), config.alpha, config.tau_scale);

  const EstimateReport subreport = fit(sub, gsub, subconfig);
  for (std::size_t k = 0; k < support.size(); ++k)
    embedded[support[k]] = subreport.beta_hat[static_cast<Index>(k)];
  return embedded;
}

FeasibilityReport feasibility_check(const RealVector& beta, const Dataset& dataset,
                                    const GammaEstimate& gamma, const builder::SnTuning& tuning) {
  const RealVector s = score(beta, dataset, gamma);
  const RealVector t = t_of_beta(beta, dataset, gamma);
  FeasibilityReport out;
  out.margins = tuning.tau * t + (1.0 + tuning.tau) * tuning.b_eps * beta.cwiseAbs() -
                s.cwiseAbs();
  out.worst_margin = out.margins.minCoeff();
  out.feasible = out.worst_margin >= 0.0;
  return out;
}

}  // namespace snconic::estimator
