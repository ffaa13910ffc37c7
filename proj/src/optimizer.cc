#include "camcond/optimizer.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "camcond/errors.h"

namespace camcond {

double LearningRate(const Schedule& schedule, int step, int total_steps) {
  if (total_steps <= 0 || step < 0 || step > total_steps) {
    Fail(ErrorCode::kInvalidArgument, "learning rate step out of range");
  }
  const double frac = static_cast<double>(step) / total_steps;
  const double log_lr =
      std::log(schedule.lr_start) * (1.0 - frac) + std::log(schedule.lr_end) * frac;
  const double base = std::exp(log_lr);
  if (schedule.warmup_steps <= 0) return base;
  const double w = std::min(static_cast<double>(step) / schedule.warmup_steps, 1.0);
  const double warm = schedule.warmup_floor +
                      (1.0 - schedule.warmup_floor) * 0.5 * (1.0 - std::cos(std::numbers::pi * w));
  return base * warm;
}

void AdamStep(AdamState& state, const AdamConfig& config, Eigen::VectorXd& params,
              const Eigen::VectorXd& grad, double lr) {
  if (grad.size() != params.size() || state.first.size() != params.size()) {
    Fail(ErrorCode::kDimensionMismatch, "Adam state, parameters and gradient differ in size");
  }
  if (!grad.allFinite()) Fail(ErrorCode::kNonFiniteGradient, "gradient has non-finite entries");
  ++state.step;
  state.first = config.beta1 * state.first + (1.0 - config.beta1) * grad;
  state.second = config.beta2 * state.second + (1.0 - config.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(config.beta1, state.step);
  const double c2 = 1.0 - std::pow(config.beta2, state.step);
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double m_hat = state.first(i) / c1;
    const double v_hat = state.second(i) / c2;
    params(i) -= lr * m_hat / (std::sqrt(v_hat) + config.eps);
  }
}

SharedLoss SharedIntrinsicsLoss(std::span<const Intrinsics> cameras, const SharedWeights& weights) {
  const size_t n = cameras.size();
  if (n < 2) Fail(ErrorCode::kInvalidArgument, "shared intrinsics loss needs at least 2 cameras");

  struct Group {
    int begin;
    int count;
    double weight;
  };
  const Group groups[] = {
      {0, 2, weights.focal}, {2, 2, weights.principal}, {4, 2, weights.distortion}};

  Intrinsics mean = Intrinsics::Zero();
  for (const auto& c : cameras) mean += c;
  mean /= static_cast<double>(n);

  SharedLoss out;
  out.gradients.assign(n, Intrinsics::Zero());
  const double inv_n = 1.0 / static_cast<double>(n);
  for (const Group& g : groups) {
    const double scale = g.weight / g.count;
    for (int p = g.begin; p < g.begin + g.count; ++p) {
      double var = 0.0;
      for (size_t i = 0; i < n; ++i) {
        const double dev = cameras[i](p) - mean(p);
        var += dev * dev;
        // The derivative through the mean sums to zero across cameras.
        out.gradients[i](p) = scale * 2.0 * inv_n * dev;
      }
      out.loss += scale * var * inv_n;
    }
  }
  return out;
}

}  // namespace camcond
