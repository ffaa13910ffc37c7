#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "camcond/camera.h"
#include "camcond/parameterization.h"

namespace camcond {

struct Observation {
  Vec3 point;
  Pixel pixel;
};

// Central-difference step for residual entry r: base * max(1, |residual[r]|).
inline constexpr double kFiniteDifferenceStep = 1e-5;

// Stacked projection Jacobian, 2m x k. Rows 2l and 2l+1 are the u and v
// derivatives of point l. Computed by chaining the analytic projection
// derivative with the forward-mode derivative of the parameterization.
MatrixXd ProjectionJacobian(const CameraMap& map, const VectorXd& residual,
                            std::span<const Vec3> points);

// Reference Jacobian by central finite differences. `step_scale` multiplies
// the default per-parameter step.
MatrixXd ProjectionJacobianFD(const CameraMap& map, const VectorXd& residual,
                              std::span<const Vec3> points, double step_scale = 1.0);

// Stacked pixels of all points, length 2m.
VectorXd ProjectAll(const PinholeCamera& cam, std::span<const Vec3> points);

// Mean squared reprojection error (1/m) sum ||Pi(x) - p||^2.
double ReprojectionMSE(const PinholeCamera& cam, std::span<const Observation> observations);

struct LossAndGradient {
  double loss = 0.0;
  VectorXd gradient;
};

// Reprojection MSE and its gradient with respect to the residual,
// (2/m) J^T r.
LossAndGradient ReprojectionLossGradient(const CameraMap& map, const VectorXd& residual,
                                         std::span<const Observation> observations);

}  // namespace camcond
