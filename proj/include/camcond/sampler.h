#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "camcond/camera.h"

namespace camcond {

struct ProxyPointSet {
  std::vector<Vec3> points;
  std::uint64_t seed = 0;
  double near = 0.0;
  double far = 0.0;
};

// Maps s in [0, 1] to a camera-frame depth in [near, far].
using DepthCurve = std::function<double(double s, double near, double far)>;

// Uniform in disparity: 1 / ((1 - s) / near + s / far).
double DisparityLinearDepth(double s, double near, double far);

inline constexpr int kDefaultProxyPoints = 1000;
inline constexpr double kDefaultProxyNear = 0.2;
inline constexpr double kDefaultProxyFar = 100.0;

// Samples m points in the camera frustum: pixels uniform over the image,
// depth from `curve` applied to a uniform s.
ProxyPointSet SampleFrustum(const PinholeCamera& cam, int m, double near, double far,
                            std::uint64_t seed, const DepthCurve& curve = DisparityLinearDepth);

}  // namespace camcond
