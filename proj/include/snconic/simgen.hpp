#pragma once

#include "snconic/types.hpp"

#include <cstdint>

namespace snconic::simgen {

// Counter-based generator: out_k = splitmix_fin(key + k * 0x9E3779B97F4A7C15).
// Substream key derivation (documented contract, stable across platforms):
//   k0  = fin(master ^ fin(tag  * 0x9E3779B97F4A7C15 + 0x632BE59BD9B4E019))
//   key = fin(k0     ^ fin(rep  * 0xC2B2AE3D27D4EB4F + 0x9E3779B97F4A7C15))
// with fin = the splitmix64 finalizer. Gaussians via Box-Muller in draw order.
struct CounterRng {
  std::uint64_t key = 0;
  std::uint64_t ctr = 0;

  static CounterRng substream(std::uint64_t master, std::uint64_t tag, std::uint64_t rep);

  std::uint64_t next_u64();
  double uniform01();  // [0, 1)
  double normal();     // N(0,1), Box-Muller pair cached

 private:
  bool has_cached_ = false;
  double cached_ = 0;
};

enum class StreamTag : std::uint64_t { X = 1, Xi = 2, W = 3, Eta = 4, Pi = 5 };

enum class BetaKind { Separated5, Separated6, Unseparated, Custom };
enum class Regime { AdditiveEIV, MAR };

struct SimConfig {
  Index n = 100;
  Index p = 10;
  double rho = 0.5;
  double sigma_xi = 1.0;
  double sigma_w = 1.0;
  BetaKind beta_kind = BetaKind::Separated5;
  RealVector beta_custom;
  Regime regime = Regime::AdditiveEIV;
  double pi_low = 0.1;
  double pi_high = 0.75;
  std::uint64_t seed = 0;
};

struct SimDraw {
  Dataset dataset;
  RealMatrix oracle_x;
  RealVector beta0;
  RealVector xi;  // retained so y = X beta0 + xi reconstructs exactly
  std::optional<double> pi_used;
};

RealVector make_beta(BetaKind kind, Index p, const RealVector* custom = nullptr);

// rep selects the replication substream of the master seed.
SimDraw gen_case1(const SimConfig& config, std::uint64_t rep = 0);
SimDraw gen_case2(const SimConfig& config, std::uint64_t rep = 0);
SimDraw generate(const SimConfig& config, std::uint64_t rep = 0);

}  // namespace snconic::simgen
