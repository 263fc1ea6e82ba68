#pragma once

#include "snconic/gamma_estimation.hpp"
#include "snconic/program_builder.hpp"
#include "snconic/solver.hpp"

namespace snconic::estimator {

enum class LambdaMode { Theoretical, Fixed };
enum class HnMode { Exact, UpperBound };

struct SnConfig {
  double alpha = 0.05;
  double tau_scale = 1.0;  // c in tau = c * n^{-1/2} * quantile(1 - alpha/(2p))
  LambdaMode lambda_mode = LambdaMode::Fixed;
  double lambda_t = 1.0;   // used in Fixed mode
  double lambda_u = 0.25;  // used in Fixed mode
  HnMode hn_mode = HnMode::Exact;
  solver::SolverSettings solver;
  bool refit = false;

  // when finite, overrides the tau formula (refit keeps the parent tau)
  double tau_override = std::numeric_limits<double>::quiet_NaN();
};

struct SolverDiagnostics {
  solver::SolveStatus status = solver::SolveStatus::MaxIters;
  long iterations = 0;
  double primal_residual = 0;
  double dual_residual = 0;
  double gap = 0;
};

struct EstimateReport {
  RealVector beta_hat;  // truncated at 1e-7
  RealVector t_hat;
  RealVector u_hat;
  std::vector<Index> threshold_set;   // 0-based column indices
  RealVector threshold_values;        // nu_j = tau * t_j(beta_hat) / mean(z_j^2)
  RealVector beta_thresholded;        // beta_hat on the set, 0 elsewhere
  std::optional<RealVector> beta_refit;
  builder::SnTuning tuning;           // resolved values
  double hn = std::numeric_limits<double>::quiet_NaN();  // set in Theoretical mode
  SolverDiagnostics solver_diag;
  double timing_s = 0;
};

double compute_tau(Index n, Index p, double alpha, double c);

// score_j(beta) = (1/n) sum_i z_ij (y_i - z_i'beta) + Gamma_jj beta_j
RealVector score(const RealVector& beta, const Dataset& dataset, const GammaEstimate& gamma);

// t_j(beta) = {(1/n) sum_i [z_ij (y_i - z_i'beta) + Gamma_jj beta_j]^2}^{1/2}
RealVector t_of_beta(const RealVector& beta, const Dataset& dataset, const GammaEstimate& gamma);

// Exact: max_j of the max-abs entry of (1/n) sum_i a_i a_i', a_i = z_ij z_i - Gamma_jj e_j,
// computed in column blocks of width `block`. UpperBound: the closed-form bound
// {max_j mean(z_j^4) + ||Gamma||_inf^2 + 2 ||Gamma||_inf max_jk |mean(z_j z_k)|}^{1/2}.
double compute_hn(const Dataset& dataset, const GammaEstimate& gamma, HnMode mode,
                  Index block = 64);

EstimateReport fit(const Dataset& dataset, const GammaEstimate& gamma, const SnConfig& config);

// nu_j of the selection rule; every column needs mean(z_j^2) > 0.
RealVector threshold_values(const RealVector& beta_hat, const Dataset& dataset,
                            const GammaEstimate& gamma, double tau);

// T = { j : |beta_hat_j| > nu_j }, strict inequality.
std::vector<Index> threshold(const RealVector& beta_hat, const Dataset& dataset,
                             const GammaEstimate& gamma, double tau);

// Fit restricted to `support` columns, re-embedded with zeros elsewhere.
RealVector refit(const Dataset& dataset, const GammaEstimate& gamma, const SnConfig& config,
                 const std::vector<Index>& support);

struct FeasibilityReport {
  bool feasible = false;
  double worst_margin = 0;
  RealVector margins;  // tau t_j(beta) + (1+tau) b_eps |beta_j| - |score_j(beta)|
};

// Evaluates the constraints at (beta, t(beta), |beta|) directly, no solver.
FeasibilityReport feasibility_check(const RealVector& beta, const Dataset& dataset,
                                    const GammaEstimate& gamma, const builder::SnTuning& tuning);

}  // namespace snconic::estimator
