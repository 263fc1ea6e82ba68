#include "snconic/sensitivity.hpp"

#include "snconic/simgen.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace snconic::sensitivity {

namespace {

void validate_query(const SensitivityQuery& query) {
  const Index p = query.psi.rows();
  if (p < 1 || query.psi.cols() != p)
    throw std::invalid_argument("sensitivity: psi must be square and nonempty");
  require_finite(query.psi, "psi");
  if ((query.psi - query.psi.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("sensitivity: psi must be symmetric");
  if (query.s < 1) throw std::invalid_argument("sensitivity: s must be >= 1");
  if (!(query.u >= 0) || !std::isfinite(query.u))
    throw std::invalid_argument("sensitivity: u must be finite and >= 0");
}

// min m  s.t.  g >= 0, the normalization row, u*sum_J g >= sum_{J^c} g,
// and -m <= (PsiSigned g)_j <= m. pin < 0 selects the l1 normalization sum g = 1;
// otherwise g_pin = 1 with g <= 1 elementwise.
double orthant_lp(const RealMatrix& psi_signed, const std::vector<char>& in_J, double u,
                  Index pin, const solver::SolverSettings& settings) {
  const Index p = psi_signed.rows();
  solver::ConicProgram lp;
  lp.num_vars = p + 1;
  lp.objective = RealVector::Zero(p + 1);
  lp.objective(p) = 1.0;
  const Index box_rows = pin >= 0 ? p : 0;
  const Index m_rows = 1 + p + box_rows + 1 + 2 * p;
  lp.num_rows = m_rows;
  lp.rhs = RealVector::Zero(m_rows);
  lp.cones = {{solver::ConeKind::Zero, 1}, {solver::ConeKind::NonNeg, m_rows - 1}};

  Index row = 0;
  if (pin < 0) {
    for (Index j = 0; j < p; ++j) lp.entries.emplace_back(row, j, 1.0);
  } else {
    lp.entries.emplace_back(row, pin, 1.0);
  }
  lp.rhs(row++) = 1.0;
  for (Index j = 0; j < p; ++j) lp.entries.emplace_back(row++, j, -1.0);
  if (pin >= 0)
    for (Index j = 0; j < p; ++j) {
      lp.entries.emplace_back(row, j, 1.0);
      lp.rhs(row++) = 1.0;
    }
  for (Index j = 0; j < p; ++j) {
    const double coef = in_J[static_cast<std::size_t>(j)] ? -u : 1.0;
    if (coef != 0.0) lp.entries.emplace_back(row, j, coef);
  }
  ++row;
  for (Index j = 0; j < p; ++j)
    for (int sign : {+1, -1}) {
      for (Index l = 0; l < p; ++l)
        if (psi_signed(j, l) != 0.0) lp.entries.emplace_back(row, l, sign * psi_signed(j, l));
      lp.entries.emplace_back(row++, p, -1.0);
    }

  solver::SolverResult result = solver::solve(lp, settings);
  if (result.status == solver::SolveStatus::MaxIters && settings.adaptive_rho) {
    // rho adaptation can rattle on the degenerate faces of these tiny LPs;
    // a fixed penalty converges in a few thousand iterations
    solver::SolverSettings fixed = settings;
    fixed.adaptive_rho = false;
    result = solver::solve(lp, fixed);
  }
  if (result.status == solver::SolveStatus::Infeasible)
    return std::numeric_limits<double>::infinity();
  if (result.status != solver::SolveStatus::Optimal)
    throw std::runtime_error(std::string("kappa_exact: subproblem ended with status ") +
                             solver::to_string(result.status));
  return std::max(0.0, result.theta(p));
}

}  // namespace

bool cone_membership(const RealVector& delta, const std::vector<Index>& J, double u) {
  require_finite(delta, "delta");
  if (!(u >= 0) || !std::isfinite(u))
    throw std::invalid_argument("cone_membership: u must be finite and >= 0");
  std::vector<char> mark(static_cast<std::size_t>(delta.size()), 0);
  for (Index j : J) {
    if (j < 0 || j >= delta.size()) throw std::out_of_range("cone_membership: index out of range");
    auto& m = mark[static_cast<std::size_t>(j)];
    if (m) throw std::invalid_argument("cone_membership: duplicate index");
    m = 1;
  }
  double on = 0, off = 0;
  for (Index j = 0; j < delta.size(); ++j)
    (mark[static_cast<std::size_t>(j)] ? on : off) += std::abs(delta(j));
  return off <= u * on;
}

double kappa_exact(const SensitivityQuery& query, const solver::SolverSettings& settings) {
  validate_query(query);
  const Index p = query.psi.rows();
  if (p > 12)
    throw std::invalid_argument("kappa_exact: enumeration supports p <= 12");
  if (query.q != mathcore::Norm::L1 && query.q != mathcore::Norm::Linf)
    throw std::invalid_argument("kappa_exact: q must be L1 or Linf");
  const Index s = std::min(query.s, p);

  // Enlarging J only relaxes the cone requirement, so the minimum over |J| <= s
  // is attained at |J| = s; global sign symmetry halves the orthant count.
  std::vector<Index> J(static_cast<std::size_t>(s));
  for (Index j = 0; j < s; ++j) J[static_cast<std::size_t>(j)] = j;
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<char> in_J(static_cast<std::size_t>(p), 0);
    for (Index j : J) in_J[static_cast<std::size_t>(j)] = 1;
    const std::uint64_t orthants = p > 1 ? (std::uint64_t{1} << (p - 1)) : 1;
    for (std::uint64_t bits = 0; bits < orthants; ++bits) {
      RealVector sigma = RealVector::Ones(p);
      for (Index j = 1; j < p; ++j)
        if (bits >> (j - 1) & 1) sigma(j) = -1.0;
      const RealMatrix psi_signed = query.psi * sigma.asDiagonal();
      if (query.q == mathcore::Norm::L1) {
        best = std::min(best, orthant_lp(psi_signed, in_J, query.u, -1, settings));
      } else {
        for (Index pin = 0; pin < p; ++pin) {
          if (!in_J[static_cast<std::size_t>(pin)] && query.u * static_cast<double>(s) < 1.0)
            continue;  // pinned off-support coordinate cannot satisfy the cone
          best = std::min(best, orthant_lp(psi_signed, in_J, query.u, pin, settings));
        }
      }
    }
    // next size-s combination in lexicographic order
    Index i = s - 1;
    while (i >= 0 && J[static_cast<std::size_t>(i)] == p - s + i) --i;
    if (i < 0) break;
    ++J[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < s; ++j)
      J[static_cast<std::size_t>(j)] = J[static_cast<std::size_t>(j - 1)] + 1;
  }
  if (!std::isfinite(best)) throw std::logic_error("kappa_exact: no feasible subproblem");
  return best;
}

double kappa_lower_bound(const SensitivityQuery& query, long samples) {
  validate_query(query);
  if (samples < 1) throw std::invalid_argument("kappa_lower_bound: samples must be >= 1");
  const Index p = query.psi.rows();
  const Index s = std::min(query.s, p);
  simgen::CounterRng rng = simgen::CounterRng::substream(0x6b617070616c62ull, 11, 0);

  std::vector<Index> perm(static_cast<std::size_t>(p));
  double best = std::numeric_limits<double>::infinity();
  for (long it = 0; it < samples; ++it) {
    for (Index j = 0; j < p; ++j) perm[static_cast<std::size_t>(j)] = j;
    for (Index j = 0; j < s; ++j) {
      const Index pick = j + static_cast<Index>(rng.uniform01() * static_cast<double>(p - j));
      std::swap(perm[static_cast<std::size_t>(j)], perm[static_cast<std::size_t>(std::min(pick, p - 1))]);
    }
    RealVector delta = RealVector::Zero(p);
    double on_l1 = 0;
    for (Index j = 0; j < s; ++j) {
      delta(perm[static_cast<std::size_t>(j)]) = rng.normal();
      on_l1 += std::abs(delta(perm[static_cast<std::size_t>(j)]));
    }
    if (p > s && on_l1 > 0) {
      RealVector off = RealVector::Zero(p - s);
      for (Index j = 0; j < p - s; ++j) off(j) = rng.normal();
      const double off_l1 = off.lpNorm<1>();
      const double budget = rng.uniform01() * query.u * on_l1;
      if (off_l1 > 0)
        for (Index j = 0; j < p - s; ++j)
          delta(perm[static_cast<std::size_t>(s + j)]) = off(j) / off_l1 * budget;
    }
    const double norm = mathcore::lq_norm(delta, query.q);
    if (norm <= 0) continue;
    delta /= norm;
    best = std::min(best, (query.psi * delta).lpNorm<Eigen::Infinity>());
  }
  if (!std::isfinite(best)) throw std::runtime_error("kappa_lower_bound: all samples degenerate");
  return best;
}

}  // namespace snconic::sensitivity
