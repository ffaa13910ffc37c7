#include "camcond/sampler.h"

#include <random>
#include <string>

namespace camcond {

double DisparityLinearDepth(double s, double near, double far) {
  return 1.0 / ((1.0 - s) / near + s / far);
}

ProxyPointSet SampleFrustum(const PinholeCamera& cam, int m, double near, double far,
                            std::uint64_t seed, const DepthCurve& curve) {
  if (m <= 0) Fail(ErrorCode::kInvalidArgument, "proxy point count must be positive");
  if (!(near > 0.0) || !(near < far)) {
    Fail(ErrorCode::kInvalidArgument, "proxy depth range needs 0 < near < far, got near=" +
                                          std::to_string(near) + " far=" + std::to_string(far));
  }
  ValidateCamera(cam);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  ProxyPointSet out;
  out.seed = seed;
  out.near = near;
  out.far = far;
  out.points.reserve(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double u = unit(rng) * cam.width;
    const double v = unit(rng) * cam.height;
    const double s = unit(rng);
    out.points.push_back(Unproject(cam, Pixel(u, v), curve(s, near, far)));
  }
  return out;
}

}  // namespace camcond
