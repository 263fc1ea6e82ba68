#pragma once

#include "snconic/types.hpp"

namespace snconic::solver {

enum class ConeKind { Zero, NonNeg, SecondOrder };

struct ConeSpec {
  ConeKind kind = ConeKind::Zero;
  Index dim = 1;

  void validate() const;
};

// Euclidean projection onto the cone. SecondOrder treats v = (s, x).
RealVector project_onto_cone(const RealVector& v, const ConeSpec& cone);
void project_onto_cone_inplace(Eigen::Ref<RealVector> v, const ConeSpec& cone);

// Projection onto the dual cone (Zero* = free, NonNeg/SOC self-dual).
void project_onto_dual_cone_inplace(Eigen::Ref<RealVector> v, const ConeSpec& cone);

// Max over the blocks of ||v_blk - proj_K(v_blk)||_inf; 0 iff v in K.
double cone_violation(const RealVector& v, const std::vector<ConeSpec>& cones);
double dual_cone_violation(const RealVector& v, const std::vector<ConeSpec>& cones);

}  // namespace snconic::solver
