#include "snconic/program_builder.hpp"

#include <cmath>
#include <stdexcept>

namespace snconic::builder {

using solver::ConeKind;
using solver::ConicProgram;

std::pair<ConicProgram, VariableLayout> build_sn_program(const Dataset& dataset,
                                                         const GammaEstimate& gamma,
                                                         const SnTuning& tuning) {
  dataset.validate();
  gamma.validate();
  const Index n = dataset.n();
  const Index p = dataset.p();
  if (n < 2) throw std::invalid_argument("build_sn_program: need n >= 2");
  if (gamma.diag.size() != p) throw std::invalid_argument("build_sn_program: gamma size != p");
  if (!(tuning.tau > 0.0) || !(tuning.tau < 1.0))
    throw std::invalid_argument("build_sn_program: tau must lie in (0,1)");
  if (tuning.lambda_t < 0.0 || tuning.lambda_u < 0.0 || tuning.b_eps < 0.0)
    throw std::invalid_argument("build_sn_program: negative tuning parameter");
  if (!std::isfinite(tuning.lambda_t) || !std::isfinite(tuning.lambda_u) ||
      !std::isfinite(tuning.b_eps))
    throw std::invalid_argument("build_sn_program: nonfinite tuning parameter");

  VariableLayout layout;
  layout.n = n;
  layout.p = p;

  ConicProgram program;
  program.num_vars = layout.dim();
  program.num_rows = layout.rows();
  program.objective = RealVector::Zero(program.num_vars);
  for (Index j = 0; j < p; ++j) program.objective[layout.v(j)] = 1.0;
  program.objective[layout.t_inf()] = tuning.lambda_t;
  program.objective[layout.u_inf()] = tuning.lambda_u;
  program.rhs = RealVector::Zero(program.num_rows);
  program.cones.push_back({ConeKind::Zero, n});
  program.cones.push_back({ConeKind::NonNeg, 8 * p});
  for (Index j = 0; j < p; ++j) program.cones.push_back({ConeKind::SecondOrder, n + 1});

  auto& A = program.entries;
  A.reserve(static_cast<std::size_t>(5 * n * p + n + 19 * p));
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const double bu = (1.0 + tuning.tau) * tuning.b_eps;

  // zero-cone rows: z_i' beta + eps_i = y_i
  for (Index i = 0; i < n; ++i) {
    const Index r = layout.row_residual(i);
    for (Index j = 0; j < p; ++j)
      if (dataset.Z(i, j) != 0.0) A.emplace_back(r, layout.beta(j), dataset.Z(i, j));
    A.emplace_back(r, layout.eps(i), 1.0);
    program.rhs[r] = dataset.y[i];
  }
  for (Index j = 0; j < p; ++j) {
    const double g = gamma.diag[j];
    // v_j -+ beta_j >= 0 and u_j -+ beta_j >= 0
    for (bool plus : {false, true}) {
      const double sign = plus ? -1.0 : 1.0;
      A.emplace_back(layout.row_v(j, plus), layout.v(j), -1.0);
      A.emplace_back(layout.row_v(j, plus), layout.beta(j), sign);
      A.emplace_back(layout.row_u(j, plus), layout.u(j), -1.0);
      A.emplace_back(layout.row_u(j, plus), layout.beta(j), sign);
    }
    // T_inf - t_j >= 0, U_inf - u_j >= 0
    A.emplace_back(layout.row_tinf(j), layout.t(j), 1.0);
    A.emplace_back(layout.row_tinf(j), layout.t_inf(), -1.0);
    A.emplace_back(layout.row_uinf(j), layout.u(j), 1.0);
    A.emplace_back(layout.row_uinf(j), layout.u_inf(), -1.0);
    // tau t_j + (1+tau) b_eps u_j -+ [(1/n) sum_i z_ij eps_i + g beta_j] >= 0
    for (bool plus : {false, true}) {
      const Index r = layout.row_score(j, plus);
      const double sign = plus ? -1.0 : 1.0;
      A.emplace_back(r, layout.t(j), -tuning.tau);
      if (bu != 0.0) A.emplace_back(r, layout.u(j), -bu);
      for (Index i = 0; i < n; ++i)
        if (dataset.Z(i, j) != 0.0)
          A.emplace_back(r, layout.eps(i), sign * dataset.Z(i, j) / static_cast<double>(n));
      if (g != 0.0) A.emplace_back(r, layout.beta(j), sign * g);
    }
    // SOC block: head t_j, tail (z_ij eps_i + g beta_j)/sqrt(n)
    const Index s = layout.soc_start(j);
    A.emplace_back(s, layout.t(j), -1.0);
    for (Index i = 0; i < n; ++i) {
      if (dataset.Z(i, j) != 0.0)
        A.emplace_back(s + 1 + i, layout.eps(i), -dataset.Z(i, j) / sqrt_n);
      if (g != 0.0) A.emplace_back(s + 1 + i, layout.beta(j), -g / sqrt_n);
    }
  }
  program.validate();
  return {std::move(program), layout};
}

RealVector map_feasible_point(const RealVector& beta, const RealVector& t, const RealVector& u,
                              const Dataset& dataset, const VariableLayout& layout) {
  if (beta.size() != layout.p || t.size() != layout.p || u.size() != layout.p)
    throw std::invalid_argument("map_feasible_point: length mismatch");
  RealVector theta = RealVector::Zero(layout.dim());
  theta.head(layout.p) = beta;
  theta.segment(layout.v(0), layout.p) = beta.cwiseAbs();
  theta.segment(layout.eps(0), layout.n) = dataset.y - dataset.Z * beta;
  theta.segment(layout.t(0), layout.p) = t;
  theta.segment(layout.u(0), layout.p) = u;
  theta[layout.t_inf()] = t.lpNorm<Eigen::Infinity>();
  theta[layout.u_inf()] = u.lpNorm<Eigen::Infinity>();
  return theta;
}

SnPoint extract_solution(const solver::SolverResult& result, const VariableLayout& layout) {
  using solver::SolveStatus;
  if (result.status != SolveStatus::Optimal && result.status != SolveStatus::MaxIters)
    throw std::invalid_argument("extract_solution: result is not Optimal or MaxIters");
  if (result.theta.size() != layout.dim())
    throw std::invalid_argument("extract_solution: layout does not match result");
  SnPoint point;
  point.beta = result.theta.head(layout.p);
  for (Index j = 0; j < layout.p; ++j)
    if (std::abs(point.beta[j]) < kTruncation) point.beta[j] = 0.0;
  point.t = result.theta.segment(layout.t(0), layout.p);
  point.u = result.theta.segment(layout.u(0), layout.p);
  return point;
}

}  // namespace snconic::builder
