#include "snconic/cone.hpp"

#include <cmath>

namespace snconic::solver {

void ConeSpec::validate() const {
  if (kind == ConeKind::SecondOrder) {
    if (dim < 2) throw std::invalid_argument("SecondOrder cone needs dim >= 2");
  } else if (dim < 1) {
    throw std::invalid_argument("cone needs dim >= 1");
  }
}

void project_onto_cone_inplace(Eigen::Ref<RealVector> v, const ConeSpec& cone) {
  if (v.size() != cone.dim) throw std::invalid_argument("project_onto_cone: dimension mismatch");
  switch (cone.kind) {
    case ConeKind::Zero:
      v.setZero();
      return;
    case ConeKind::NonNeg:
      v = v.cwiseMax(0.0);
      return;
    case ConeKind::SecondOrder: {
      double s = v[0];
      double nx = v.tail(cone.dim - 1).norm();
      if (nx <= s) return;
      if (nx <= -s) {
        v.setZero();
        return;
      }
      double scale = 0.5 * (s + nx);
      v[0] = scale;
      v.tail(cone.dim - 1) *= scale / nx;
      return;
    }
  }
}

RealVector project_onto_cone(const RealVector& v, const ConeSpec& cone) {
  RealVector out = v;
  project_onto_cone_inplace(out, cone);
  return out;
}

void project_onto_dual_cone_inplace(Eigen::Ref<RealVector> v, const ConeSpec& cone) {
  if (cone.kind == ConeKind::Zero) return;  // dual of {0} is the whole space
  project_onto_cone_inplace(v, cone);
}

namespace {
template <typename Proj>
double violation_impl(const RealVector& v, const std::vector<ConeSpec>& cones, Proj proj) {
  double worst = 0;
  Index at = 0;
  for (const auto& cone : cones) {
    RealVector blk = v.segment(at, cone.dim);
    RealVector prj = blk;
    proj(prj, cone);
    worst = std::max(worst, (blk - prj).lpNorm<Eigen::Infinity>());
    at += cone.dim;
  }
  if (at != v.size()) throw std::invalid_argument("cone_violation: dimension mismatch");
  return worst;
}
}  // namespace

double cone_violation(const RealVector& v, const std::vector<ConeSpec>& cones) {
  return violation_impl(v, cones, [](Eigen::Ref<RealVector> b, const ConeSpec& c) {
    project_onto_cone_inplace(b, c);
  });
}

double dual_cone_violation(const RealVector& v, const std::vector<ConeSpec>& cones) {
  return violation_impl(v, cones, [](Eigen::Ref<RealVector> b, const ConeSpec& c) {
    project_onto_dual_cone_inplace(b, c);
  });
}

}  // namespace snconic::solver
