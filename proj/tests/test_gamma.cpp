#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "snconic/dataset_io.hpp"
#include "snconic/gamma_estimation.hpp"
#include "snconic/simgen.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

using namespace snconic;

TEST_CASE("known additive noise level") {
  auto g = gammaest::known_additive(1.0, 3);
  REQUIRE(g.diag.size() == 3);
  CHECK((g.diag - RealVector::Ones(3)).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(g.b_eps == 0.0);

  g = gammaest::known_additive(0.0, 5);
  CHECK(g.diag.lpNorm<Eigen::Infinity>() == 0.0);

  g = gammaest::known_additive(2.0, 1);
  CHECK(g.diag(0) == doctest::Approx(4.0).epsilon(1e-15));

  CHECK_THROWS_AS(gammaest::known_additive(-1.0, 2), std::invalid_argument);
}

TEST_CASE("mar hand example") {
  Dataset raw;
  raw.Z = RealMatrix(4, 1);
  raw.Z << 2, 0, 2, 0;
  raw.y = RealVector::Zero(4);
  raw.mask = RealMatrix(4, 1);
  *raw.mask << 1, 0, 1, 0;
  raw.provenance = Provenance::MissingAtRandom;

  const auto res = gammaest::mar_estimate(raw);
  CHECK(res.pi_hat(0) == doctest::Approx(0.5).epsilon(1e-15));
  RealVector want(4);
  want << 4, 0, 4, 0;
  CHECK((res.surrogate.Z.col(0) - want).lpNorm<Eigen::Infinity>() <= 1e-14);
  // (0.5 / 0.25) * (1/4)(4 + 4) = 4
  CHECK(res.gamma.diag(0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(res.gamma.b_eps ==
        doctest::Approx(0.25 * std::sqrt(std::log(2.0 * 1 / 0.05) / 4.0)).epsilon(1e-12));
}

TEST_CASE("mar with no missingness is a passthrough") {
  Dataset raw;
  raw.Z = RealMatrix(3, 2);
  raw.Z << 1, 2, 3, 4, 5, 6;
  raw.y = RealVector::Zero(3);
  raw.mask = RealMatrix::Ones(3, 2);

  const auto res = gammaest::mar_estimate(raw);
  CHECK(res.pi_hat.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((res.surrogate.Z - raw.Z).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(res.gamma.diag.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("mar rejects a fully missing column") {
  Dataset raw;
  raw.Z = RealMatrix::Zero(3, 1);
  raw.y = RealVector::Zero(3);
  raw.mask = RealMatrix::Zero(3, 1);
  CHECK_THROWS_AS(gammaest::mar_estimate(raw), std::invalid_argument);

  Dataset no_mask;
  no_mask.Z = RealMatrix::Ones(3, 1);
  no_mask.y = RealVector::Zero(3);
  CHECK_THROWS_AS(gammaest::mar_estimate(no_mask), std::invalid_argument);
}

TEST_CASE("mar scale equivariance") {
  auto rng = simgen::CounterRng::substream(55, 2, 0);
  Dataset raw;
  raw.Z = RealMatrix(20, 3);
  raw.mask = RealMatrix(20, 3);
  raw.y = RealVector::Zero(20);
  for (Index i = 0; i < 20; ++i)
    for (Index j = 0; j < 3; ++j) {
      const bool seen = rng.uniform01() > 0.3;
      (*raw.mask)(i, j) = seen ? 1.0 : 0.0;
      raw.Z(i, j) = seen ? rng.normal() : 0.0;
    }

  const auto base = gammaest::mar_estimate(raw);
  const double alpha = 2.5;
  Dataset scaled = raw;
  scaled.Z *= alpha;
  const auto res = gammaest::mar_estimate(scaled);
  CHECK((res.gamma.diag - alpha * alpha * base.gamma.diag).lpNorm<Eigen::Infinity>() <=
        1e-12 * base.gamma.diag.lpNorm<Eigen::Infinity>());
  CHECK((res.pi_hat - base.pi_hat).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("b_eps formula") {
  const Index n = 300, p = 100;
  Dataset raw;
  raw.Z = RealMatrix::Ones(n, p);
  raw.y = RealVector::Zero(n);
  raw.mask = RealMatrix::Ones(n, p);
  (*raw.mask)(0, 0) = 0.0;
  raw.Z(0, 0) = 0.0;
  const auto res = gammaest::mar_estimate(raw, 0.05, 0.25);
  const double want = 0.25 * std::sqrt(std::log(2.0 * p / 0.05) / n);
  CHECK(res.gamma.b_eps == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("mar plug-in is consistent for known pi") {
  // deterministic x, Bernoulli mask with pi = 0.4; the plug-in should land
  // within 5% of (pi/(1-pi)) * mean(x^2) at n = 10^4
  const Index n = 10000;
  const double pi = 0.4;
  auto rng = simgen::CounterRng::substream(55, 2, 1);
  Dataset raw;
  raw.Z = RealMatrix(n, 1);
  raw.mask = RealMatrix(n, 1);
  raw.y = RealVector::Zero(n);
  double sum_x2 = 0;
  for (Index i = 0; i < n; ++i) {
    const double x = 1.0 + 0.5 * rng.normal();
    sum_x2 += x * x;
    const bool seen = rng.uniform01() > pi;
    (*raw.mask)(i, 0) = seen ? 1.0 : 0.0;
    raw.Z(i, 0) = seen ? x : 0.0;
  }
  const auto res = gammaest::mar_estimate(raw);
  const double want = pi / (1.0 - pi) * (sum_x2 / static_cast<double>(n));
  CHECK(std::fabs(res.gamma.diag(0) - want) <= 0.05 * want);
}

TEST_CASE("surrogate error cross-covariance is near zero") {
  // Condition check: for j != k, mean over draws of w_ij w_ik stays within
  // the 4/sqrt(n) Monte Carlo band, w = surrogate z - x with deterministic x
  const Index n = 4000, p = 3;
  auto rng = simgen::CounterRng::substream(55, 2, 2);
  RealMatrix X(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) X(i, j) = rng.normal();

  const double pi = 0.3;
  Dataset raw;
  raw.Z = RealMatrix(n, p);
  raw.mask = RealMatrix(n, p);
  raw.y = RealVector::Zero(n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) {
      const bool seen = rng.uniform01() > pi;
      (*raw.mask)(i, j) = seen ? 1.0 : 0.0;
      raw.Z(i, j) = seen ? X(i, j) : 0.0;
    }
  const auto res = gammaest::mar_estimate(raw);
  const RealMatrix W = res.surrogate.Z - X;
  for (Index j = 0; j < p; ++j)
    for (Index k = 0; k < p; ++k) {
      if (j == k) continue;
      const double cross = (W.col(j).array() * W.col(k).array()).mean();
      CHECK(std::fabs(cross) <= 4.0 / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("external gamma passthrough and validation") {
  RealVector diag(2);
  diag << 1, 2;
  const auto g = gammaest::load_external(diag, 0.1, 0.05);
  CHECK(g.diag(0) == 1.0);
  CHECK(g.diag(1) == 2.0);
  CHECK(g.b_eps == 0.1);
  CHECK(g.eps == 0.05);

  RealVector neg(1);
  neg << -1;
  CHECK_THROWS_AS(gammaest::load_external(neg, 0.1, 0.05), std::invalid_argument);

  const auto zero = gammaest::load_external(RealVector::Zero(3), 0.0, 0.05);
  CHECK(zero.diag.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("dataset csv and gamma json round trips") {
  auto rng = simgen::CounterRng::substream(55, 2, 3);
  Dataset ds;
  ds.Z = RealMatrix(5, 3);
  ds.y = RealVector(5);
  ds.mask = RealMatrix(5, 3);
  for (Index i = 0; i < 5; ++i) {
    ds.y(i) = rng.normal();
    for (Index j = 0; j < 3; ++j) {
      const bool seen = rng.uniform01() > 0.25;
      (*ds.mask)(i, j) = seen ? 1.0 : 0.0;
      ds.Z(i, j) = seen ? rng.normal() : 0.0;
    }
  }

  io::write_dataset_csv(ds, "gamma_rt_data.csv", "gamma_rt_mask.csv");
  const Dataset back = io::read_dataset_csv("gamma_rt_data.csv", "gamma_rt_mask.csv");
  std::remove("gamma_rt_data.csv");
  std::remove("gamma_rt_mask.csv");
  CHECK((back.Z - ds.Z).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((back.y - ds.y).lpNorm<Eigen::Infinity>() == 0.0);
  REQUIRE(back.mask.has_value());
  CHECK((*back.mask - *ds.mask).lpNorm<Eigen::Infinity>() == 0.0);

  GammaEstimate g;
  g.diag = RealVector(3);
  g.diag << 0.5, 1.25, 0.0;
  g.b_eps = 0.125;
  g.eps = 0.05;
  io::write_gamma_json(g, "gamma_rt.json");
  const GammaEstimate gback = io::read_gamma_json("gamma_rt.json");
  std::remove("gamma_rt.json");
  CHECK((gback.diag - g.diag).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(gback.b_eps == g.b_eps);
  CHECK(gback.eps == g.eps);
}
