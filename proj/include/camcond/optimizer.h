#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace camcond {

// Log-linear decay from lr_start to lr_end, times a cosine warmup multiplier
// rising from warmup_floor to 1 over the first warmup_steps.
struct Schedule {
  double lr_start = 1e-3;
  double lr_end = 1e-4;
  int warmup_steps = 2500;
  double warmup_floor = 1e-8;
};

double LearningRate(const Schedule& schedule, int step, int total_steps);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamState() = default;
  explicit AdamState(int k) : first(Eigen::VectorXd::Zero(k)), second(Eigen::VectorXd::Zero(k)) {}

  int step = 0;
  Eigen::VectorXd first;
  Eigen::VectorXd second;
};

// One bias-corrected Adam update of `params` in place.
void AdamStep(AdamState& state, const AdamConfig& config, Eigen::VectorXd& params,
              const Eigen::VectorXd& grad, double lr);

// Realized intrinsics in camera-field order: fx fy u0 v0 k1 k2.
using Intrinsics = Eigen::Matrix<double, 6, 1>;

struct SharedWeights {
  double focal = 1e-1;
  double principal = 1e-2;
  double distortion = 1e-2;
};

struct SharedLoss {
  double loss = 0.0;
  // d loss / d intrinsics, one entry per camera.
  std::vector<Intrinsics> gradients;
};

// Weighted variance of the intrinsics across cameras. Each group (focal,
// principal point, distortion) contributes the mean of its members'
// population variances.
SharedLoss SharedIntrinsicsLoss(std::span<const Intrinsics> cameras, const SharedWeights& weights);

}  // namespace camcond
