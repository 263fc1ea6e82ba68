#pragma once

#include "snconic/solver.hpp"
#include "snconic/types.hpp"

namespace snconic::builder {

struct SnTuning {
  double tau = 0;
  double lambda_t = 0;
  double lambda_u = 0;
  double b_eps = 0;
};

// Variable order: beta(p) | v(p, l1 epigraph) | eps(n, residuals) | t(p) | u(p) | T_inf | U_inf.
// Row order: zero-cone residual rows (n) | nonneg v_j -+ beta_j (2p) | nonneg u_j -+ beta_j (2p)
//            | nonneg T_inf - t_j (p) | nonneg U_inf - u_j (p) | nonneg two-sided score rows (2p)
//            | p SOC blocks of dim n+1 (head t_j, tail (z_ij eps_i + G_jj beta_j)/sqrt(n)).
struct VariableLayout {
  Index n = 0;
  Index p = 0;

  Index beta(Index j) const { return j; }
  Index v(Index j) const { return p + j; }
  Index eps(Index i) const { return 2 * p + i; }
  Index t(Index j) const { return 2 * p + n + j; }
  Index u(Index j) const { return 3 * p + n + j; }
  Index t_inf() const { return 4 * p + n; }
  Index u_inf() const { return 4 * p + n + 1; }
  Index dim() const { return 4 * p + n + 2; }

  Index row_residual(Index i) const { return i; }
  Index row_v(Index j, bool plus) const { return n + 2 * j + (plus ? 1 : 0); }
  Index row_u(Index j, bool plus) const { return n + 2 * p + 2 * j + (plus ? 1 : 0); }
  Index row_tinf(Index j) const { return n + 4 * p + j; }
  Index row_uinf(Index j) const { return n + 5 * p + j; }
  Index row_score(Index j, bool plus) const { return n + 6 * p + 2 * j + (plus ? 1 : 0); }
  Index soc_start(Index j) const { return n + 8 * p + j * (n + 1); }
  Index rows() const { return n + 8 * p + p * (n + 1); }
};

std::pair<solver::ConicProgram, VariableLayout> build_sn_program(const Dataset& dataset,
                                                                 const GammaEstimate& gamma,
                                                                 const SnTuning& tuning);

// theta = (beta, |beta|, y - Z beta, t, u, ||t||_inf, ||u||_inf); used by equivalence tests.
RealVector map_feasible_point(const RealVector& beta, const RealVector& t, const RealVector& u,
                              const Dataset& dataset, const VariableLayout& layout);

struct SnPoint {
  RealVector beta;  // |beta_j| < 1e-7 truncated to exactly 0
  RealVector t;
  RealVector u;
};

SnPoint extract_solution(const solver::SolverResult& result, const VariableLayout& layout);

inline constexpr double kTruncation = 1e-7;

}  // namespace snconic::builder
