#pragma once

#include <cmath>

#include <ceres/jet.h>

namespace camcond {

// Number of derivative lanes carried through the parameterization maps. The
// widest parameterization has 15 residual entries.
inline constexpr int kMaxDim = 15;

using Jet = ceres::Jet<double, kMaxDim>;

inline double ValueOf(double x) { return x; }

template <typename T, int N>
double ValueOf(const ceres::Jet<T, N>& x) {
  return x.a;
}

}  // namespace camcond
