#include "camcond/preconditioner.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "camcond/derivatives.h"

namespace camcond {

std::string ToString(PrecondMode mode) {
  switch (mode) {
    case PrecondMode::kNone: return "none";
    case PrecondMode::kDiagonal: return "diag";
    case PrecondMode::kFull: return "full";
  }
  return "unknown";
}

PrecondMode ParsePrecondMode(std::string_view name) {
  if (name == "none") return PrecondMode::kNone;
  if (name == "diag" || name == "diagonal") return PrecondMode::kDiagonal;
  if (name == "full") return PrecondMode::kFull;
  Fail(ErrorCode::kConfig, "unknown preconditioner mode '" + std::string(name) + "'");
}

namespace {

// Pairwise sum of J_l^T J_l over row pairs [begin, end) of the point list.
MatrixXd PairwiseGram(const MatrixXd& jac, Eigen::Index begin, Eigen::Index end) {
  constexpr Eigen::Index kLeaf = 8;
  if (end - begin <= kLeaf) {
    const auto block = jac.middleRows(2 * begin, 2 * (end - begin));
    return block.transpose() * block;
  }
  const Eigen::Index mid = begin + (end - begin) / 2;
  return PairwiseGram(jac, begin, mid) + PairwiseGram(jac, mid, end);
}

}  // namespace

MatrixXd ProjectionCovariance(const CameraMap& map, const VectorXd& residual,
                              std::span<const Vec3> points) {
  if (points.empty()) Fail(ErrorCode::kEmptyPointSet, "covariance needs at least one point");
  const MatrixXd jac = ProjectionJacobian(map, residual, points);
  MatrixXd sigma = PairwiseGram(jac, 0, static_cast<Eigen::Index>(points.size()));
  return 0.5 * (sigma + sigma.transpose());
}

Covariance ComputeCovariance(const Parameterization& param, std::span<const Vec3> points) {
  Covariance cov;
  cov.sigma = ProjectionCovariance(param, VectorXd::Zero(param.dim()), points);
  cov.m = static_cast<int>(points.size());
  cov.kind = param.kind();
  return cov;
}

MatrixXd DampenedCovariance(const MatrixXd& sigma, double lambda, double mu) {
  MatrixXd out = sigma;
  out.diagonal() += lambda * sigma.diagonal();
  out.diagonal().array() += mu;
  return out;
}

Preconditioner BuildPreconditioner(const MatrixXd& sigma, double lambda, double mu,
                                   PrecondMode mode) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) {
    Fail(ErrorCode::kDimensionMismatch, "covariance must be a non-empty square matrix");
  }
  if (!(lambda >= 0.0) || !(mu >= 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "dampening lambda and mu must be non-negative");
  }
  if (mode == PrecondMode::kNone) {
    Fail(ErrorCode::kInvalidArgument, "cannot build a preconditioner in mode 'none'");
  }
  const MatrixXd damped = DampenedCovariance(sigma, lambda, mu);
  const Eigen::Index k = sigma.rows();

  Preconditioner out;
  out.lambda = lambda;
  out.mu = mu;
  out.mode = mode;

  if (mode == PrecondMode::kDiagonal) {
    const VectorXd diag = damped.diagonal();
    const double floor = 1e-12 * std::max(diag.maxCoeff(), mu);
    out.p_inv = MatrixXd::Zero(k, k);
    for (Eigen::Index r = 0; r < k; ++r) {
      double d = diag(r);
      if (d < floor) {
        d = floor;
        ++out.clamp_count;
      }
      if (!(d > 0.0)) Fail(ErrorCode::kNotPositiveDefinite, "diagonal entry is not positive");
      out.p_inv(r, r) = 1.0 / std::sqrt(d);
    }
    return out;
  }

  // Extended precision: the dampened covariance can have condition numbers
  // near 1e10, where a double eigensolve loses the last digits of P_inv.
  using MatrixXl = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using VectorXl = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  Eigen::SelfAdjointEigenSolver<MatrixXl> eig(damped.cast<long double>());
  if (eig.info() != Eigen::Success) {
    Fail(ErrorCode::kNotPositiveDefinite, "eigendecomposition failed");
  }
  VectorXl values = eig.eigenvalues();
  const long double floor = 1e-12L * std::max(values.maxCoeff(), static_cast<long double>(mu));
  for (Eigen::Index r = 0; r < k; ++r) {
    if (values(r) < floor) {
      values(r) = floor;
      ++out.clamp_count;
    }
    if (!(values(r) > 0.0L)) {
      Fail(ErrorCode::kNotPositiveDefinite, "dampened covariance has no positive spectrum");
    }
  }
  const MatrixXl& q = eig.eigenvectors();
  const VectorXl inv_sqrt = values.cwiseSqrt().cwiseInverse();
  out.p_inv = (q * inv_sqrt.asDiagonal() * q.transpose()).cast<double>();
  out.p_inv = 0.5 * (out.p_inv + out.p_inv.transpose());
  return out;
}

PreconditionedParameterization::PreconditionedParameterization(Parameterization inner,
                                                               MatrixXd p_inv)
    : inner_(std::move(inner)), p_inv_(std::move(p_inv)) {
  if (p_inv_.rows() != inner_.dim() || p_inv_.cols() != inner_.dim()) {
    Fail(ErrorCode::kDimensionMismatch,
         "preconditioner is " + std::to_string(p_inv_.rows()) + "x" +
             std::to_string(p_inv_.cols()) + " but " + ToString(inner_.kind()) + " has k=" +
             std::to_string(inner_.dim()));
  }
}

void PreconditionedParameterization::CheckDim(const VectorXd& latent) const {
  if (latent.size() != inner_.dim()) {
    Fail(ErrorCode::kDimensionMismatch, "latent vector has wrong length");
  }
}

VectorXd PreconditionedParameterization::Residual(const VectorXd& latent) const {
  CheckDim(latent);
  return p_inv_ * latent;
}

PinholeCamera PreconditionedParameterization::Apply(const VectorXd& latent) const {
  return inner_.Apply(Residual(latent));
}

CameraFieldJacobian PreconditionedParameterization::FieldJacobian(const VectorXd& latent,
                                                                  PinholeCamera* realized) const {
  return inner_.FieldJacobian(Residual(latent), realized) * p_inv_;
}

PreconditionedParameterization Wrap(const Parameterization& param, const Preconditioner& precond) {
  return PreconditionedParameterization(param, precond.p_inv);
}

VectorXd MotionMagnitudes(const CameraMap& map, std::span<const Vec3> points) {
  const MatrixXd sigma = ProjectionCovariance(map, VectorXd::Zero(map.dim()), points);
  return (sigma.diagonal() / static_cast<double>(points.size())).cwiseSqrt();
}

namespace {

nlohmann::json RowMajor(const MatrixXd& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  }
  return out;
}

}  // namespace

nlohmann::json ToJson(const Covariance& cov, const Preconditioner& precond) {
  nlohmann::json j;
  j["kind"] = ToString(cov.kind);
  j["k"] = cov.sigma.rows();
  j["m"] = cov.m;
  j["lambda"] = precond.lambda;
  j["mu"] = precond.mu;
  j["sigma"] = RowMajor(cov.sigma);
  j["p_inv"] = RowMajor(precond.p_inv);
  return j;
}

MatrixXd MatrixFromJson(const nlohmann::json& row_major, int k) {
  if (!row_major.is_array() || static_cast<int>(row_major.size()) != k * k) {
    Fail(ErrorCode::kConfig, "matrix array must hold k*k numbers");
  }
  MatrixXd m(k, k);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) m(r, c) = row_major.at(r * k + c).get<double>();
  }
  return m;
}

}  // namespace camcond
