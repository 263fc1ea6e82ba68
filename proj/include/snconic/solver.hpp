#pragma once

#include "snconic/conic_program.hpp"

#include <functional>

namespace snconic::solver {

struct SolverSettings {
  double eps_primal = 1e-7;  // relative, see check_kkt metrics
  double eps_dual = 1e-7;
  double eps_gap = 1e-7;
  long max_iters = 200000;
  double relaxation = 1.8;  // over-relaxation alpha in (1,2)
  bool scaling = true;      // Ruiz equilibration of A

  // splitting internals
  double rho = 0.1;
  double sigma = 1e-6;
  double rho_eq_scale = 1e3;  // extra weight on zero-cone rows
  bool adaptive_rho = true;
  long check_interval = 25;

  // residual trace, called every trace_interval iterations when set
  long trace_interval = 100;
  std::function<void(long, double, double, double)> trace;
};

enum class SolveStatus { Optimal, MaxIters, Infeasible, Unbounded };

const char* to_string(SolveStatus s);

struct SolverResult {
  RealVector theta;  // primal, length d
  RealVector slack;  // nu, length m, in K
  RealVector dual;   // y, length m, in K*
  SolveStatus status = SolveStatus::MaxIters;
  double primal_residual = 0;
  double dual_residual = 0;
  double gap = 0;
  long iterations = 0;
};

SolverResult solve(const ConicProgram& program, const SolverSettings& settings);

struct KktResiduals {
  double primal = 0;  // ||A theta + nu - b|| / (1 + ||b||)
  double dual = 0;    // ||A'y + c|| / (1 + ||c||)
  double gap = 0;     // |c'theta + b'y| / (1 + |c'theta| + |b'y|)
};

// Recomputes the relative residual metrics from scratch.
KktResiduals check_kkt(const ConicProgram& program, const SolverResult& result);

}  // namespace snconic::solver
