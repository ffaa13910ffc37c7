#include "camcond/geometry.h"

#include <cmath>
#include <numbers>
#include <string>

namespace camcond {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kAngleNearPi: return "AngleNearPi";
    case ErrorCode::kDegenerateBasis: return "DegenerateBasis";
    case ErrorCode::kBehindCamera: return "BehindCamera";
    case ErrorCode::kUndistortDiverged: return "UndistortDiverged";
    case ErrorCode::kBadLayout: return "BadLayout";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kNotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyPointSet: return "EmptyPointSet";
    case ErrorCode::kNonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::kInsufficientVisibility: return "InsufficientVisibility";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfig: return "ConfigError";
  }
  return "Unknown";
}

namespace {

Vec3 Vee(const Mat3& m) { return {m(2, 1), m(0, 2), m(1, 0)}; }

}  // namespace

double RotationAngle(const Mat3& rotation) {
  // atan2 keeps full precision near both 0 and pi, unlike acos of the trace.
  const Vec3 s = 0.5 * Vee(rotation - rotation.transpose());
  const double c = 0.5 * (rotation.trace() - 1.0);
  return std::atan2(s.norm(), c);
}

Vec3 LogSO3(const Mat3& rotation) {
  const Vec3 s = 0.5 * Vee(rotation - rotation.transpose());
  const double sin_theta = s.norm();
  const double cos_theta = 0.5 * (rotation.trace() - 1.0);
  const double theta = std::atan2(sin_theta, cos_theta);
  if (theta >= std::numbers::pi - kNearPiMargin) {
    Fail(ErrorCode::kAngleNearPi,
         "rotation angle " + std::to_string(theta) + " too close to pi for a stable log");
  }
  if (theta < kSmallAngle) {
    // theta / sin(theta) ~ 1 + theta^2 / 6
    return (1.0 + theta * theta / 6.0) * s;
  }
  return (theta / sin_theta) * s;
}

ScrewAxis LogSE3(const RigidTransform& transform) {
  ScrewAxis out;
  out.omega = LogSO3(transform.rotation);
  const double theta_sq = out.omega.squaredNorm();
  const Mat3 k = Skew<double>(out.omega);
  double d;
  if (theta_sq < kSmallAngle * kSmallAngle) {
    d = 1.0 / 12.0 + theta_sq / 720.0;
  } else {
    const double theta = std::sqrt(theta_sq);
    const double a = std::sin(theta) / theta;
    const double b = (1.0 - std::cos(theta)) / theta_sq;
    d = (1.0 - a / (2.0 * b)) / theta_sq;
  }
  const Mat3 v_inv = Mat3::Identity() - 0.5 * k + d * (k * k);
  out.v = v_inv * transform.translation;
  return out;
}

Vec6 RotationToRot6d(const Mat3& rotation) {
  Vec6 a;
  a << rotation.col(0), rotation.col(1);
  return a;
}

bool IsRotation(const Mat3& m, double tol) {
  if (!m.allFinite()) return false;
  const Mat3 gram = m.transpose() * m - Mat3::Identity();
  return gram.cwiseAbs().maxCoeff() <= tol && std::abs(m.determinant() - 1.0) <= tol;
}

RigidTransform LookAt(const Vec3& position, const Vec3& target, const Vec3& up) {
  const Vec3 z = (target - position).normalized();
  Vec3 x = z.cross(up);
  if (x.norm() < 1e-12) {
    Fail(ErrorCode::kInvalidArgument, "look-at direction parallel to up vector");
  }
  x.normalize();
  const Vec3 y = z.cross(x);
  RigidTransform out;
  out.rotation.row(0) = x.transpose();
  out.rotation.row(1) = y.transpose();
  out.rotation.row(2) = z.transpose();
  out.translation = -(out.rotation * position);
  return out;
}

}  // namespace camcond
