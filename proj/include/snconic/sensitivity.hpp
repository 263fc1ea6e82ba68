#pragma once

#include "snconic/mathcore.hpp"
#include "snconic/solver.hpp"

namespace snconic::sensitivity {

struct SensitivityQuery {
  RealMatrix psi;  // p x p, symmetric to 1e-10
  Index s = 1;
  double u = 3.0;
  mathcore::Norm q = mathcore::Norm::Linf;
};

// ||delta_{J^c}||_1 <= u * ||delta_J||_1, boundary included.
bool cone_membership(const RealVector& delta, const std::vector<Index>& J, double u);

// Exact kappa_q(s,u) = min_{|J|<=s} min_{delta in cone, ||delta||_q = 1} ||Psi delta||_inf
// by enumerating supports, orthants and (for q = inf) the pinned coordinate,
// solving one LP per combination. q in {L1, Linf}, p <= 12.
double kappa_exact(const SensitivityQuery& query, const solver::SolverSettings& settings = {});

// Sampled min of ||Psi delta||_inf over random cone points at ||delta||_q = 1.
// The true kappa is a minimum, so this is a conservative UPPER estimate of it,
// not a lower bound; the name reflects its screening role. Deterministic.
double kappa_lower_bound(const SensitivityQuery& query, long samples);

}  // namespace snconic::sensitivity
