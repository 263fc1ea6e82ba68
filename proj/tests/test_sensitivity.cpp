#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "snconic/sensitivity.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

using namespace snconic;
using sensitivity::SensitivityQuery;

namespace {

RealMatrix random_symmetric(Index p, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  RealMatrix A(p, p);
  for (Index i = 0; i < A.size(); ++i) A(i) = normal(rng);
  return 0.5 * (A + A.transpose());
}

SensitivityQuery query_of(RealMatrix psi, Index s, double u, mathcore::Norm q) {
  SensitivityQuery query;
  query.psi = std::move(psi);
  query.s = s;
  query.u = u;
  query.q = q;
  return query;
}

}  // namespace

TEST_CASE("cone membership boundary and errors") {
  RealVector delta(3);
  delta << 1, -2, 0;

  // mass entirely on J is always inside, entirely off J never is
  CHECK(sensitivity::cone_membership(delta, {0, 1}, 0.0));
  CHECK_FALSE(sensitivity::cone_membership(delta, {2}, 10.0));

  // ||delta_{J^c}||_1 = u ||delta_J||_1 sits on the boundary, which counts
  RealVector even(2);
  even << 1, 1;
  CHECK(sensitivity::cone_membership(even, {0}, 1.0));
  CHECK_FALSE(sensitivity::cone_membership(even, {0}, 0.999));

  // empty J admits only the zero vector
  CHECK_FALSE(sensitivity::cone_membership(even, {}, 5.0));
  CHECK(sensitivity::cone_membership(RealVector::Zero(2), {}, 5.0));

  CHECK_THROWS_AS(sensitivity::cone_membership(delta, {3}, 1.0), std::out_of_range);
  CHECK_THROWS_AS(sensitivity::cone_membership(delta, {-1}, 1.0), std::out_of_range);
  CHECK_THROWS_AS(sensitivity::cone_membership(delta, {0, 0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(sensitivity::cone_membership(delta, {0}, -1.0), std::invalid_argument);
}

TEST_CASE("exact constant on identity and diagonal designs") {
  // 1-d: the only unit vectors are +-1
  RealMatrix scalar(1, 1);
  scalar << -2.5;
  CHECK(sensitivity::kappa_exact(query_of(scalar, 1, 1.0, mathcore::Norm::Linf)) ==
        doctest::Approx(2.5).epsilon(1e-5));

  // identity with sup normalization: ||delta||_inf = 1 forces the value 1
  CHECK(sensitivity::kappa_exact(query_of(RealMatrix::Identity(2, 2), 1, 3.0,
                                          mathcore::Norm::Linf)) ==
        doctest::Approx(1.0).epsilon(1e-5));

  // identity with l1 normalization: spread mass as evenly as the cone allows,
  // optimum max(1/p, 1/(1+u))
  CHECK(sensitivity::kappa_exact(query_of(RealMatrix::Identity(3, 3), 1, 3.0,
                                          mathcore::Norm::L1)) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-4));
  CHECK(sensitivity::kappa_exact(query_of(RealMatrix::Identity(3, 3), 1, 1.0,
                                          mathcore::Norm::L1)) ==
        doctest::Approx(0.5).epsilon(1e-4));
  CHECK(sensitivity::kappa_exact(query_of(RealMatrix::Identity(2, 2), 1, 3.0,
                                          mathcore::Norm::L1)) ==
        doctest::Approx(0.5).epsilon(1e-4));

  // diagonal with sup normalization: the largest coordinate pays its own
  // diagonal, so the minimum is the smallest diagonal whatever s and u are
  RealMatrix diag = RealMatrix::Zero(2, 2);
  diag(0, 0) = 2.0;
  diag(1, 1) = 0.5;
  for (Index s : {Index{1}, Index{2}})
    for (double u : {0.0, 1.0})
      CHECK(sensitivity::kappa_exact(query_of(diag, s, u, mathcore::Norm::Linf)) ==
            doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("rank deficient design exposes cancellation") {
  const RealMatrix ones = RealMatrix::Ones(2, 2);
  // (1, -1) lies in the u = 1 cone and is annihilated
  CHECK(sensitivity::kappa_exact(query_of(ones, 1, 1.0, mathcore::Norm::Linf)) <= 1e-5);
  // u = 1/2 caps the off-support mass at b = 1/2, leaving |1 - b| = 1/2
  CHECK(sensitivity::kappa_exact(query_of(ones, 1, 0.5, mathcore::Norm::Linf)) ==
        doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("zero design gives zero") {
  const auto query = query_of(RealMatrix::Zero(3, 3), 1, 2.0, mathcore::Norm::Linf);
  CHECK(sensitivity::kappa_exact(query) <= 1e-6);
  CHECK(sensitivity::kappa_lower_bound(query, 50) == 0.0);
}

TEST_CASE("monotone in support size and cone width") {
  const RealMatrix psi = random_symmetric(4, 91);
  solver::SolverSettings settings;
  settings.max_iters = 1000000;  // a few of the wide-cone subproblems sit on flat faces
  settings.eps_primal = settings.eps_dual = settings.eps_gap = 1e-6;  // 1e-5 comparisons below
  const auto kappa = [&](Index s, double u) {
    return sensitivity::kappa_exact(query_of(psi, s, u, mathcore::Norm::Linf), settings);
  };
  // growing J or widening the cone only enlarges the feasible set
  const double k1 = kappa(1, 1.0);
  const double k2 = kappa(2, 1.0);
  const double k3 = kappa(3, 1.0);
  CHECK(k1 >= k2 - 1e-5);
  CHECK(k2 >= k3 - 1e-5);
  CHECK(kappa(2, 1.0) >= kappa(2, 2.0) - 1e-5);
  CHECK(k1 > 0.0);
}

TEST_CASE("sup and l1 normalizations bracket each other") {
  const Index p = 3;
  const RealMatrix psi = random_symmetric(p, 37);
  const double k_inf =
      sensitivity::kappa_exact(query_of(psi, 1, 2.0, mathcore::Norm::Linf));
  const double k_one = sensitivity::kappa_exact(query_of(psi, 1, 2.0, mathcore::Norm::L1));
  // ||d||_inf <= ||d||_1 <= p ||d||_inf translates into kappa_inf >= kappa_1 >= kappa_inf / p
  CHECK(k_inf >= k_one - 1e-5);
  CHECK(k_one >= k_inf / static_cast<double>(p) - 1e-5);
}

TEST_CASE("sampled screen upper bounds the exact minimum") {
  const auto query = query_of(random_symmetric(4, 53), 2, 1.0, mathcore::Norm::Linf);
  const double exact = sensitivity::kappa_exact(query);
  const double sampled = sensitivity::kappa_lower_bound(query, 500);
  CHECK(exact <= sampled + 1e-7);

  // deterministic, and a longer run extends the same sample stream
  CHECK(sensitivity::kappa_lower_bound(query, 500) == sampled);
  CHECK(sensitivity::kappa_lower_bound(query, 2000) <= sampled);

  // on the identity the sampler should come close to the known optimum 1/2
  const auto ident = query_of(RealMatrix::Identity(2, 2), 1, 3.0, mathcore::Norm::L1);
  const double screen = sensitivity::kappa_lower_bound(ident, 20000);
  const double truth = sensitivity::kappa_exact(ident);
  CHECK(screen >= truth - 1e-9);
  CHECK(screen <= truth + 0.01);
}

TEST_CASE("query validation") {
  const RealMatrix eye = RealMatrix::Identity(2, 2);
  CHECK_THROWS_AS(sensitivity::kappa_exact(query_of(RealMatrix(0, 0), 1, 1.0,
                                                    mathcore::Norm::Linf)),
                  std::invalid_argument);
  CHECK_THROWS_AS(sensitivity::kappa_exact(query_of(RealMatrix::Identity(13, 13), 1, 1.0,
                                                    mathcore::Norm::Linf)),
                  std::invalid_argument);
  CHECK_THROWS_AS(sensitivity::kappa_exact(query_of(eye, 1, 1.0, mathcore::Norm::L2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(sensitivity::kappa_exact(query_of(eye, 0, 1.0, mathcore::Norm::Linf)),
                  std::invalid_argument);
  CHECK_THROWS_AS(sensitivity::kappa_exact(query_of(eye, 1, -1.0, mathcore::Norm::Linf)),
                  std::invalid_argument);

  RealMatrix skew(2, 2);
  skew << 0, 1, -1, 0;
  CHECK_THROWS_AS(sensitivity::kappa_exact(query_of(skew, 1, 1.0, mathcore::Norm::Linf)),
                  std::invalid_argument);
  RealMatrix rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(sensitivity::kappa_exact(query_of(rect, 1, 1.0, mathcore::Norm::Linf)),
                  std::invalid_argument);

  CHECK_THROWS_AS(sensitivity::kappa_lower_bound(query_of(eye, 1, 1.0, mathcore::Norm::Linf), 0),
                  std::invalid_argument);
}
