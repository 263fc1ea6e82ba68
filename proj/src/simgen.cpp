#include "snconic/simgen.hpp"

#include <cmath>
#include <stdexcept>

namespace snconic::simgen {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t fin(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

void validate_config(const SimConfig& c) {
  if (c.n < 1 || c.p < 1) throw std::invalid_argument("simgen: n, p must be >= 1");
  if (!(std::abs(c.rho) < 1.0)) throw std::invalid_argument("simgen: |rho| must be < 1");
  if (!(c.sigma_xi >= 0.0) || !(c.sigma_w >= 0.0))
    throw std::invalid_argument("simgen: sigma_xi, sigma_w must be >= 0");
  if (!(c.pi_low >= 0.0) || !(c.pi_low <= c.pi_high) || !(c.pi_high < 1.0))
    throw std::invalid_argument("simgen: need 0 <= pi_low <= pi_high < 1");
}

// Row-major draw order: x_{i1} = eta, x_{ij} = rho x_{i,j-1} + sqrt(1-rho^2) eta.
RealMatrix draw_ar1(CounterRng& rng, Index n, Index p, double rho) {
  RealMatrix x(n, p);
  const double fresh = std::sqrt(1.0 - rho * rho);
  for (Index i = 0; i < n; ++i) {
    x(i, 0) = rng.normal();
    for (Index j = 1; j < p; ++j) x(i, j) = rho * x(i, j - 1) + fresh * rng.normal();
  }
  return x;
}

SimDraw draw_common(const SimConfig& config, std::uint64_t rep) {
  SimDraw draw;
  CounterRng x_rng = CounterRng::substream(config.seed, static_cast<std::uint64_t>(StreamTag::X), rep);
  draw.oracle_x = draw_ar1(x_rng, config.n, config.p, config.rho);
  draw.beta0 = make_beta(config.beta_kind, config.p,
                         config.beta_kind == BetaKind::Custom ? &config.beta_custom : nullptr);
  CounterRng xi_rng = CounterRng::substream(config.seed, static_cast<std::uint64_t>(StreamTag::Xi), rep);
  draw.xi.resize(config.n);
  for (Index i = 0; i < config.n; ++i) draw.xi[i] = config.sigma_xi * xi_rng.normal();
  draw.dataset.y = draw.oracle_x * draw.beta0 + draw.xi;
  return draw;
}

}  // namespace

CounterRng CounterRng::substream(std::uint64_t master, std::uint64_t tag, std::uint64_t rep) {
  const std::uint64_t k0 = fin(master ^ fin(tag * kGolden + 0x632BE59BD9B4E019ull));
  CounterRng rng;
  rng.key = fin(k0 ^ fin(rep * 0xC2B2AE3D27D4EB4Full + kGolden));
  return rng;
}

std::uint64_t CounterRng::next_u64() { return fin(key + (ctr++) * kGolden); }

double CounterRng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u1 = uniform01();
  while (u1 == 0.0) u1 = uniform01();
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 6.283185307179586476925286766559 * u2;
  cached_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

RealVector make_beta(BetaKind kind, Index p, const RealVector* custom) {
  RealVector beta = RealVector::Zero(p);
  switch (kind) {
    case BetaKind::Separated5:
      if (p < 5) throw std::invalid_argument("make_beta: Separated5 needs p >= 5");
      beta.head(5).setOnes();
      return beta;
    case BetaKind::Separated6:
      if (p < 6) throw std::invalid_argument("make_beta: Separated6 needs p >= 6");
      beta.head(6).setOnes();
      return beta;
    case BetaKind::Unseparated: {
      if (p < 6) throw std::invalid_argument("make_beta: Unseparated needs p >= 6");
      beta[0] = 1.0;
      beta[1] = 1.0 / 2.0;
      beta[2] = 1.0 / 3.0;
      beta[3] = 1.0 / 4.0;
      beta[4] = 1.0 / 5.0;
      beta[5] = 1.0 / 10.0;
      return beta;
    }
    case BetaKind::Custom:
      if (!custom || custom->size() != p)
        throw std::invalid_argument("make_beta: custom vector must have length p");
      return *custom;
  }
  throw std::invalid_argument("make_beta: unknown kind");
}

SimDraw gen_case1(const SimConfig& config, std::uint64_t rep) {
  validate_config(config);
  SimDraw draw = draw_common(config, rep);
  draw.dataset.Z = draw.oracle_x;
  if (config.sigma_w > 0.0) {
    CounterRng w_rng =
        CounterRng::substream(config.seed, static_cast<std::uint64_t>(StreamTag::W), rep);
    for (Index i = 0; i < config.n; ++i)
      for (Index j = 0; j < config.p; ++j) draw.dataset.Z(i, j) += config.sigma_w * w_rng.normal();
  }
  draw.dataset.provenance = Provenance::AdditiveKnown;
  return draw;
}

SimDraw gen_case2(const SimConfig& config, std::uint64_t rep) {
  validate_config(config);
  SimDraw draw = draw_common(config, rep);
  CounterRng pi_rng = CounterRng::substream(config.seed, static_cast<std::uint64_t>(StreamTag::Pi), rep);
  const double pi = config.pi_low + (config.pi_high - config.pi_low) * pi_rng.uniform01();
  draw.pi_used = pi;
  CounterRng eta_rng =
      CounterRng::substream(config.seed, static_cast<std::uint64_t>(StreamTag::Eta), rep);
  RealMatrix mask(config.n, config.p);
  draw.dataset.Z.resize(config.n, config.p);
  for (Index i = 0; i < config.n; ++i)
    for (Index j = 0; j < config.p; ++j) {
      mask(i, j) = eta_rng.uniform01() < 1.0 - pi ? 1.0 : 0.0;
      draw.dataset.Z(i, j) = mask(i, j) * draw.oracle_x(i, j);
    }
  draw.dataset.mask = std::move(mask);
  draw.dataset.provenance = Provenance::MissingAtRandom;
  return draw;
}

SimDraw generate(const SimConfig& config, std::uint64_t rep) {
  return config.regime == Regime::AdditiveEIV ? gen_case1(config, rep) : gen_case2(config, rep);
}

}  // namespace snconic::simgen
