#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace snconic {

using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

void require_finite(const RealVector& v, const std::string& what);
void require_finite(const RealMatrix& m, const std::string& what);

enum class Provenance { AdditiveKnown, MissingAtRandom, External };

// Observed response y and noisy design Z; mask (1 = observed) only for MAR data.
struct Dataset {
  RealVector y;
  RealMatrix Z;
  std::optional<RealMatrix> mask;
  Provenance provenance = Provenance::External;

  Index n() const { return Z.rows(); }
  Index p() const { return Z.cols(); }
  void validate() const;
};

// Diagonal bias-correction estimate with precision bound b_eps at confidence eps.
struct GammaEstimate {
  RealVector diag;
  double b_eps = 0.0;
  double eps = 0.05;

  void validate() const;
};

}  // namespace snconic
