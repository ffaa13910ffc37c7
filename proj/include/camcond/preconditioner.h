#pragma once

#include <span>
#include <string>

#include <Eigen/Core>

#include "camcond/camera.h"
#include "camcond/parameterization.h"
#include "json.hpp"

namespace camcond {

enum class PrecondMode { kNone, kDiagonal, kFull };

std::string ToString(PrecondMode mode);
PrecondMode ParsePrecondMode(std::string_view name);

// Dampening defaults used for camera preconditioning.
inline constexpr double kDefaultLambda = 1e-1;
inline constexpr double kDefaultMu = 1e-8;

// Proxy-projection covariance Sigma = J^T J over m points at residual 0.
struct Covariance {
  MatrixXd sigma;
  int m = 0;
  ParamKind kind;
};

Covariance ComputeCovariance(const Parameterization& param, std::span<const Vec3> points);

// Sum over points of J_l^T J_l with pairwise summation, for an arbitrary map
// evaluated at `residual`.
MatrixXd ProjectionCovariance(const CameraMap& map, const VectorXd& residual,
                              std::span<const Vec3> points);

// Sigma + lambda diag(Sigma) + mu I.
MatrixXd DampenedCovariance(const MatrixXd& sigma, double lambda, double mu);

struct Preconditioner {
  MatrixXd p_inv;
  double lambda = 0.0;
  double mu = 0.0;
  PrecondMode mode = PrecondMode::kFull;
  // Eigenvalues (or diagonal entries in diagonal mode) raised to the floor.
  int clamp_count = 0;
};

Preconditioner BuildPreconditioner(const MatrixXd& sigma, double lambda, double mu,
                                   PrecondMode mode = PrecondMode::kFull);

inline Preconditioner BuildPreconditioner(const Covariance& cov, double lambda, double mu,
                                          PrecondMode mode = PrecondMode::kFull) {
  return BuildPreconditioner(cov.sigma, lambda, mu, mode);
}

// Camera map over latent parameters: residual = p_inv * latent.
class PreconditionedParameterization : public CameraMap {
 public:
  PreconditionedParameterization(Parameterization inner, MatrixXd p_inv);

  const Parameterization& inner() const { return inner_; }
  const MatrixXd& p_inv() const { return p_inv_; }
  int dim() const override { return inner_.dim(); }

  VectorXd Residual(const VectorXd& latent) const;
  PinholeCamera Apply(const VectorXd& latent) const override;
  CameraFieldJacobian FieldJacobian(const VectorXd& latent,
                                    PinholeCamera* realized = nullptr) const override;

 private:
  void CheckDim(const VectorXd& latent) const;

  Parameterization inner_;
  MatrixXd p_inv_;
};

PreconditionedParameterization Wrap(const Parameterization& param, const Preconditioner& precond);

// Per-axis RMS pixel displacement per unit parameter, sqrt(Sigma[r][r] / m),
// evaluated at a zero residual.
VectorXd MotionMagnitudes(const CameraMap& map, std::span<const Vec3> points);

// {kind, k, m, lambda, mu, sigma, p_inv}; matrices row-major.
nlohmann::json ToJson(const Covariance& cov, const Preconditioner& precond);
MatrixXd MatrixFromJson(const nlohmann::json& rows_major, int k);

}  // namespace camcond
