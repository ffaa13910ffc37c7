#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "camcond/errors.h"
#include "camcond/scalar.h"

namespace camcond {

template <typename T>
using Vec3T = Eigen::Matrix<T, 3, 1>;
template <typename T>
using Mat3T = Eigen::Matrix<T, 3, 3>;

using Vec3 = Vec3T<double>;
using Mat3 = Mat3T<double>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

// Below this angle the Rodrigues coefficients switch to their Taylor series.
inline constexpr double kSmallAngle = 1e-6;
// log maps refuse rotations closer than this to a half turn.
inline constexpr double kNearPiMargin = 1e-3;

// Rigid world-to-camera transform: x_c = rotation * x_w + translation.
template <typename T>
struct RigidTransformT {
  Mat3T<T> rotation = Mat3T<T>::Identity();
  Vec3T<T> translation = Vec3T<T>::Zero();

  Vec3T<T> operator()(const Vec3T<T>& x) const { return rotation * x + translation; }

  RigidTransformT operator*(const RigidTransformT& rhs) const {
    return {rotation * rhs.rotation, rotation * rhs.translation + translation};
  }

  RigidTransformT inverse() const {
    Mat3T<T> rt = rotation.transpose();
    return {rt, -(rt * translation)};
  }
};

using RigidTransform = RigidTransformT<double>;

// se(3) screw axis (omega; v).
struct ScrewAxis {
  Vec3 omega = Vec3::Zero();
  Vec3 v = Vec3::Zero();

  Vec6 stacked() const {
    Vec6 s;
    s << omega, v;
    return s;
  }
};

template <typename T>
Mat3T<T> Skew(const Vec3T<T>& w) {
  Mat3T<T> k;
  k << T(0), -w.z(), w.y(),  //
      w.z(), T(0), -w.x(),   //
      -w.y(), w.x(), T(0);
  return k;
}

namespace internal {

// Coefficients a = sin(t)/t, b = (1-cos t)/t^2, c = (t - sin t)/t^3.
template <typename T>
void RodriguesCoefficients(const T& theta_sq, T* a, T* b, T* c) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  if (ValueOf(theta_sq) < kSmallAngle * kSmallAngle) {
    *a = T(1.0) - theta_sq / 6.0;
    *b = T(0.5) - theta_sq / 24.0;
    *c = T(1.0 / 6.0) - theta_sq / 120.0;
    return;
  }
  T theta = sqrt(theta_sq);
  T s = sin(theta);
  T co = cos(theta);
  *a = s / theta;
  *b = (T(1.0) - co) / theta_sq;
  *c = (theta - s) / (theta_sq * theta);
}

}  // namespace internal

template <typename T>
Mat3T<T> ExpSO3(const Vec3T<T>& omega) {
  T a, b, c;
  internal::RodriguesCoefficients(omega.squaredNorm(), &a, &b, &c);
  Mat3T<T> k = Skew(omega);
  return Mat3T<T>::Identity() + a * k + b * (k * k);
}

// Left Jacobian of SO(3), V(omega); maps v to the translation of exp_se3.
template <typename T>
Mat3T<T> LeftJacobianSO3(const Vec3T<T>& omega) {
  T a, b, c;
  internal::RodriguesCoefficients(omega.squaredNorm(), &a, &b, &c);
  Mat3T<T> k = Skew(omega);
  return Mat3T<T>::Identity() + b * k + c * (k * k);
}

template <typename T>
RigidTransformT<T> ExpSE3(const Vec3T<T>& omega, const Vec3T<T>& v) {
  T a, b, c;
  internal::RodriguesCoefficients(omega.squaredNorm(), &a, &b, &c);
  Mat3T<T> k = Skew(omega);
  Mat3T<T> k2 = k * k;
  RigidTransformT<T> out;
  out.rotation = Mat3T<T>::Identity() + a * k + b * k2;
  out.translation = (Mat3T<T>::Identity() + b * k + c * k2) * v;
  return out;
}

inline RigidTransform ExpSE3(const ScrewAxis& s) { return ExpSE3<double>(s.omega, s.v); }

Vec3 LogSO3(const Mat3& rotation);
ScrewAxis LogSE3(const RigidTransform& transform);

// Geodesic rotation angle in radians, valid over [0, pi].
double RotationAngle(const Mat3& rotation);

// Gram-Schmidt map from the continuous 6D representation. Columns of the
// result are (b1, b2, b1 x b2).
template <typename T>
Mat3T<T> Rot6dToRotation(const Eigen::Matrix<T, 6, 1>& a) {
  using std::sqrt;
  Vec3T<T> a1 = a.template head<3>();
  Vec3T<T> a2 = a.template tail<3>();
  const double n1 = ValueOf(a1.norm());
  const double n2 = ValueOf(a2.norm());
  if (!(n1 > 0.0) || !(n2 > 0.0)) {
    Fail(ErrorCode::kDegenerateBasis, "rot6d: zero basis vector");
  }
  const double sin_between = ValueOf(a1.cross(a2).norm()) / (n1 * n2);
  if (!(sin_between > 1e-9)) {
    Fail(ErrorCode::kDegenerateBasis, "rot6d: basis vectors are parallel");
  }
  Vec3T<T> b1 = a1 / sqrt(a1.squaredNorm());
  Vec3T<T> u2 = a2 - b1.dot(a2) * b1;
  Vec3T<T> b2 = u2 / sqrt(u2.squaredNorm());
  Vec3T<T> b3 = b1.cross(b2);
  Mat3T<T> r;
  r.col(0) = b1;
  r.col(1) = b2;
  r.col(2) = b3;
  return r;
}

Vec6 RotationToRot6d(const Mat3& rotation);

// Orthonormal within tol per entry with det +1.
bool IsRotation(const Mat3& m, double tol = 1e-9);

// World-to-camera transform for a camera at `position` looking at `target`
// with world `up` mapping to image-up (camera y points down in the image).
RigidTransform LookAt(const Vec3& position, const Vec3& target, const Vec3& up = Vec3::UnitY());

}  // namespace camcond
