#include "camcond/camera.h"

#include <cmath>

namespace camcond {

const std::array<std::string, kNumCameraFields>& CameraFieldNames() {
  static const std::array<std::string, kNumCameraFields> names = {
      "fx",  "fy",  "u0",  "v0",  "k1",  "k2",  "r00", "r01", "r02",
      "r10", "r11", "r12", "r20", "r21", "r22", "tx",  "ty",  "tz"};
  return names;
}

FieldVector Flatten(const PinholeCamera& cam) {
  FieldVector out;
  FlattenCamera(cam, out.data());
  return out;
}

void ValidateCamera(const PinholeCamera& cam) {
  if (!(cam.fx > 0.0) || !(cam.fy > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "focal lengths must be positive");
  }
  if (cam.width <= 0 || cam.height <= 0) {
    Fail(ErrorCode::kInvalidArgument, "image size must be positive");
  }
  if (!std::isfinite(cam.u0) || !std::isfinite(cam.v0) || !std::isfinite(cam.k1) ||
      !std::isfinite(cam.k2) || !cam.pose.rotation.allFinite() ||
      !cam.pose.translation.allFinite()) {
    Fail(ErrorCode::kNonFinite, "camera has non-finite fields");
  }
}

Pixel ProjectWithJacobian(const PinholeCamera& cam, const Vec3& x, FieldJacobian* jacobian) {
  const Vec3 xc = cam.pose(x);
  if (!(xc.z() > kMinDepth)) {
    Fail(ErrorCode::kBehindCamera, "point at camera depth " + std::to_string(xc.z()));
  }
  const double inv_z = 1.0 / xc.z();
  // Same operation order as Project so that both paths agree bit for bit.
  const double nx = xc.x() / xc.z();
  const double ny = xc.y() / xc.z();
  const double r2 = nx * nx + ny * ny;
  const double factor = 1.0 + cam.k1 * r2 + cam.k2 * r2 * r2;
  const double dx = nx * factor;
  const double dy = ny * factor;
  const Pixel p(cam.fx * dx + cam.u0, cam.fy * dy + cam.v0);
  if (jacobian == nullptr) return p;

  FieldJacobian& j = *jacobian;
  j.setZero();
  j(0, 0) = dx;
  j(1, 1) = dy;
  j(0, 2) = 1.0;
  j(1, 3) = 1.0;
  j(0, 4) = cam.fx * nx * r2;
  j(1, 4) = cam.fy * ny * r2;
  j(0, 5) = cam.fx * nx * r2 * r2;
  j(1, 5) = cam.fy * ny * r2 * r2;

  // d(distorted)/d(normalized)
  const double dfactor = 2.0 * (cam.k1 + 2.0 * cam.k2 * r2);
  Eigen::Matrix2d dd_dn;
  dd_dn << factor + dfactor * nx * nx, dfactor * nx * ny,  //
      dfactor * nx * ny, factor + dfactor * ny * ny;
  Eigen::Matrix<double, 2, 3> dn_dxc;
  dn_dxc << inv_z, 0.0, -nx * inv_z,  //
      0.0, inv_z, -ny * inv_z;
  Eigen::Matrix<double, 2, 3> dp_dxc = dd_dn * dn_dxc;
  dp_dxc.row(0) *= cam.fx;
  dp_dxc.row(1) *= cam.fy;

  // x_c = R x + t, so d x_c[i] / d R(i, c) = x[c].
  for (int i = 0; i < 3; ++i) {
    for (int c = 0; c < 3; ++c) j.col(6 + 3 * i + c) = dp_dxc.col(i) * x(c);
  }
  j.block<2, 3>(0, 15) = dp_dxc;
  return p;
}

Vec2 Undistort(double k1, double k2, const Vec2& distorted) {
  constexpr int kMaxIterations = 20;
  Vec2 n = distorted;
  for (int it = 0; it < kMaxIterations; ++it) {
    const double r2 = n.squaredNorm();
    const Vec2 next = distorted / (1.0 + k1 * r2 + k2 * r2 * r2);
    const double step = (next - n).norm();
    n = next;
    if (step < 1e-12) break;
  }
  const double r2 = n.squaredNorm();
  const double residual = (n * (1.0 + k1 * r2 + k2 * r2 * r2) - distorted).norm();
  if (!(residual <= 1e-6)) {
    Fail(ErrorCode::kUndistortDiverged,
         "undistortion residual " + std::to_string(residual) + " after 20 iterations");
  }
  return n;
}

Vec3 Unproject(const PinholeCamera& cam, const Pixel& p, double depth) {
  if (!(depth > 0.0)) Fail(ErrorCode::kInvalidArgument, "unproject depth must be positive");
  const Vec2 distorted((p.x() - cam.u0) / cam.fx, (p.y() - cam.v0) / cam.fy);
  const Vec2 n = Undistort(cam.k1, cam.k2, distorted);
  const Vec3 xc(n.x() * depth, n.y() * depth, depth);
  return cam.pose.rotation.transpose() * (xc - cam.pose.translation);
}

}  // namespace camcond
