#include "camcond/derivatives.h"

#include <algorithm>
#include <cmath>

namespace camcond {

namespace {

void CheckFinite(const Pixel& p) {
  if (!p.allFinite()) Fail(ErrorCode::kNonFinite, "projection produced a non-finite pixel");
}

}  // namespace

VectorXd ProjectAll(const PinholeCamera& cam, std::span<const Vec3> points) {
  VectorXd out(2 * static_cast<Eigen::Index>(points.size()));
  for (size_t l = 0; l < points.size(); ++l) {
    const Pixel p = Project(cam, points[l]);
    CheckFinite(p);
    out.segment<2>(2 * static_cast<Eigen::Index>(l)) = p;
  }
  return out;
}

MatrixXd ProjectionJacobian(const CameraMap& map, const VectorXd& residual,
                            std::span<const Vec3> points) {
  PinholeCamera cam;
  const CameraFieldJacobian fields = map.FieldJacobian(residual, &cam);
  MatrixXd jac(2 * static_cast<Eigen::Index>(points.size()), map.dim());
  FieldJacobian point_jac;
  for (size_t l = 0; l < points.size(); ++l) {
    CheckFinite(ProjectWithJacobian(cam, points[l], &point_jac));
    jac.middleRows<2>(2 * static_cast<Eigen::Index>(l)).noalias() = point_jac * fields;
  }
  if (!jac.allFinite()) Fail(ErrorCode::kNonFinite, "non-finite Jacobian entry");
  return jac;
}

MatrixXd ProjectionJacobianFD(const CameraMap& map, const VectorXd& residual,
                              std::span<const Vec3> points, double step_scale) {
  const int k = map.dim();
  MatrixXd jac(2 * static_cast<Eigen::Index>(points.size()), k);
  for (int r = 0; r < k; ++r) {
    const double h = kFiniteDifferenceStep * std::max(1.0, std::abs(residual(r))) * step_scale;
    VectorXd plus = residual;
    VectorXd minus = residual;
    plus(r) += h;
    minus(r) -= h;
    // Use the realized step so the difference quotient is exact in the input.
    const double width = plus(r) - minus(r);
    jac.col(r) = (ProjectAll(map.Apply(plus), points) - ProjectAll(map.Apply(minus), points)) / width;
  }
  return jac;
}

double ReprojectionMSE(const PinholeCamera& cam, std::span<const Observation> observations) {
  if (observations.empty()) Fail(ErrorCode::kEmptyPointSet, "no observations");
  double sum = 0.0;
  for (const auto& obs : observations) {
    const Pixel p = Project(cam, obs.point);
    CheckFinite(p);
    sum += (p - obs.pixel).squaredNorm();
  }
  return sum / static_cast<double>(observations.size());
}

LossAndGradient ReprojectionLossGradient(const CameraMap& map, const VectorXd& residual,
                                         std::span<const Observation> observations) {
  if (observations.empty()) Fail(ErrorCode::kEmptyPointSet, "no observations");
  PinholeCamera cam;
  const CameraFieldJacobian fields = map.FieldJacobian(residual, &cam);
  FieldVector field_grad = FieldVector::Zero();
  FieldJacobian point_jac;
  double sum = 0.0;
  for (const auto& obs : observations) {
    const Pixel p = ProjectWithJacobian(cam, obs.point, &point_jac);
    CheckFinite(p);
    const Vec2 r = p - obs.pixel;
    sum += r.squaredNorm();
    field_grad.noalias() += point_jac.transpose() * r;
  }
  const double m = static_cast<double>(observations.size());
  LossAndGradient out;
  out.loss = sum / m;
  out.gradient = (2.0 / m) * (fields.transpose() * field_grad);
  if (!out.gradient.allFinite()) Fail(ErrorCode::kNonFinite, "non-finite loss gradient");
  return out;
}

}  // namespace camcond
