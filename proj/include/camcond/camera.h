#pragma once

#include <array>
#include <cmath>
#include <string>

#include <Eigen/Core>

#include "camcond/errors.h"
#include "camcond/geometry.h"
#include "camcond/scalar.h"

namespace camcond {

// Minimum camera-frame depth accepted by the perspective divide.
inline constexpr double kMinDepth = 1e-6;

using Vec2 = Eigen::Vector2d;
using Pixel = Vec2;

// Pinhole camera with two-coefficient radial distortion applied to
// normalized image coordinates. Pose maps world points into the camera frame.
template <typename T>
struct CameraT {
  T fx = T(1.0);
  T fy = T(1.0);
  T u0 = T(0.0);
  T v0 = T(0.0);
  T k1 = T(0.0);
  T k2 = T(0.0);
  RigidTransformT<T> pose;
  int width = 1;
  int height = 1;
};

using PinholeCamera = CameraT<double>;

// Flattened camera fields: fx fy u0 v0 k1 k2, rotation row-major, translation.
inline constexpr int kNumCameraFields = 18;
using FieldVector = Eigen::Matrix<double, kNumCameraFields, 1>;
using FieldJacobian = Eigen::Matrix<double, 2, kNumCameraFields>;

const std::array<std::string, kNumCameraFields>& CameraFieldNames();

template <typename T>
void FlattenCamera(const CameraT<T>& cam, T* out) {
  out[0] = cam.fx;
  out[1] = cam.fy;
  out[2] = cam.u0;
  out[3] = cam.v0;
  out[4] = cam.k1;
  out[5] = cam.k2;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out[6 + 3 * r + c] = cam.pose.rotation(r, c);
  }
  for (int i = 0; i < 3; ++i) out[15 + i] = cam.pose.translation(i);
}

FieldVector Flatten(const PinholeCamera& cam);

// Throws InvalidArgument unless focal lengths and image size are positive.
void ValidateCamera(const PinholeCamera& cam);

template <typename T>
Eigen::Matrix<T, 2, 1> Project(const CameraT<T>& cam, const Vec3T<T>& x) {
  const Vec3T<T> xc = cam.pose(x);
  if (!(ValueOf(xc.z()) > kMinDepth)) {
    Fail(ErrorCode::kBehindCamera, "point at camera depth " + std::to_string(ValueOf(xc.z())));
  }
  const T nx = xc.x() / xc.z();
  const T ny = xc.y() / xc.z();
  const T r2 = nx * nx + ny * ny;
  const T factor = T(1.0) + cam.k1 * r2 + cam.k2 * r2 * r2;
  return {cam.fx * (nx * factor) + cam.u0, cam.fy * (ny * factor) + cam.v0};
}

inline Pixel Project(const PinholeCamera& cam, const Vec3& x) { return Project<double>(cam, x); }

// Pixel plus its analytic derivative with respect to the flattened camera
// fields (see FlattenCamera).
Pixel ProjectWithJacobian(const PinholeCamera& cam, const Vec3& x, FieldJacobian* jacobian);

// Removes radial distortion from normalized coordinates by fixed-point
// iteration.
Vec2 Undistort(double k1, double k2, const Vec2& distorted);

// World point at camera-frame depth `depth` on the ray through pixel `p`.
Vec3 Unproject(const PinholeCamera& cam, const Pixel& p, double depth);

inline Vec3 CameraCenter(const PinholeCamera& cam) {
  return -(cam.pose.rotation.transpose() * cam.pose.translation);
}

inline bool InImage(const PinholeCamera& cam, const Pixel& p) {
  return p.x() >= 0.0 && p.x() < cam.width && p.y() >= 0.0 && p.y() < cam.height;
}

}  // namespace camcond
