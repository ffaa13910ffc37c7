#include <algorithm>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "test_util.h"

using namespace camcond;
using camcond::testing::AllKinds;
using camcond::testing::MaxAbs;
using camcond::testing::RandomCamera;
using camcond::testing::SimpleCamera;

namespace {

Eigen::VectorXd Eigenvalues(const MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<MatrixXd>(m).eigenvalues();
}

}  // namespace

TEST_CASE("preconditioner closed forms") {
  CHECK(MaxAbs(BuildPreconditioner(MatrixXd::Identity(3, 3), 0, 0).p_inv -
               MatrixXd::Identity(3, 3)) <= 1e-15);
  MatrixXd d(2, 2);
  d << 4, 0, 0, 1;
  MatrixXd expected(2, 2);
  expected << 0.5, 0, 0, 1;
  CHECK(MaxAbs(BuildPreconditioner(d, 0, 0).p_inv - expected) <= 1e-15);

  MatrixXd s(2, 2);
  s << 2, 1, 1, 2;
  const Preconditioner p = BuildPreconditioner(s, 0.1, 1e-8);
  const MatrixXd damped = DampenedCovariance(s, 0.1, 1e-8);
  CHECK(MaxAbs(p.p_inv * damped * p.p_inv - MatrixXd::Identity(2, 2)) <= 1e-10);
  CHECK(MaxAbs(p.p_inv - p.p_inv.transpose()) == 0.0);
}

TEST_CASE("dampened covariance") {
  MatrixXd s(2, 2);
  s << 2, 1, 1, 3;
  MatrixXd expected(2, 2);
  expected << 2 + 0.2 + 0.5, 1, 1, 3 + 0.3 + 0.5;
  CHECK(MaxAbs(DampenedCovariance(s, 0.1, 0.5) - expected) <= 1e-15);
}

TEST_CASE("diagonal mode equals full mode on diagonal covariance") {
  MatrixXd s = MatrixXd::Zero(4, 4);
  s.diagonal() << 9, 0.25, 100, 1e-3;
  const MatrixXd full = BuildPreconditioner(s, 0.1, 1e-8, PrecondMode::kFull).p_inv;
  const MatrixXd diag = BuildPreconditioner(s, 0.1, 1e-8, PrecondMode::kDiagonal).p_inv;
  CHECK(MaxAbs(full - diag) <= 1e-12 * MaxAbs(full));

  MatrixXd dense(2, 2);
  dense << 4, 1, 1, 9;
  const MatrixXd dp = BuildPreconditioner(dense, 0, 0, PrecondMode::kDiagonal).p_inv;
  CHECK(dp(0, 1) == 0.0);
  CHECK(dp(0, 0) == doctest::Approx(0.5));
  CHECK(dp(1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(BuildPreconditioner(dense, 0, 0, PrecondMode::kNone), Error);
}

TEST_CASE("clamping keeps singular covariances finite") {
  MatrixXd s = MatrixXd::Zero(3, 3);
  s(0, 0) = 1.0;
  const Preconditioner p = BuildPreconditioner(s, 0, 0);
  CHECK(p.p_inv.allFinite());
  CHECK(p.clamp_count == 2);
}

TEST_CASE("monotone dampening") {
  std::mt19937_64 rng(31);
  const PinholeCamera cam = RandomCamera(rng);
  const Parameterization param(ParamKind{ParamFamily::kSE3FocalIntrinsics}, cam);
  const MatrixXd sigma = ComputeCovariance(param, SampleFrustum(cam, 200, 1, 10, 1).points).sigma;
  Eigen::VectorXd prev = Eigenvalues(BuildPreconditioner(sigma, 0.1, 0.0).p_inv);
  for (double mu : {1e-8, 1e-2, 1.0, 1e2, 1e4}) {
    const Eigen::VectorXd now = Eigenvalues(BuildPreconditioner(sigma, 0.1, mu).p_inv);
    CHECK(((now.array() - prev.array()) <= 1e-12 * prev.array().abs()).all());
    prev = now;
  }
}

TEST_CASE("covariance diagonal equals summed squared jacobian entries") {
  std::mt19937_64 rng(33);
  const PinholeCamera cam = RandomCamera(rng);
  for (const ParamKind kind : AllKinds()) {
    const Parameterization param(kind, cam);
    const ProxyPointSet proxy = SampleFrustum(cam, 100, 1, 10, 2);
    const Covariance cov = ComputeCovariance(param, proxy.points);
    const MatrixXd j = ProjectionJacobian(param, VectorXd::Zero(param.dim()), proxy.points);
    const Eigen::VectorXd expected = j.colwise().squaredNorm();
    CHECK(((cov.sigma.diagonal() - expected).array().abs() <=
           1e-9 * expected.array().abs().max(1.0)).all());
    CHECK(MaxAbs(cov.sigma - cov.sigma.transpose()) == 0.0);
    CHECK(cov.m == 100);
  }
}

TEST_CASE("covariance matches directional finite differences") {
  std::mt19937_64 rng(35);
  std::normal_distribution<double> n(0.0, 1.0);
  const PinholeCamera cam = RandomCamera(rng);
  const Parameterization param(ParamKind{ParamFamily::kFocalPoseIntrinsics}, cam);
  const ProxyPointSet proxy = SampleFrustum(cam, 200, 1, 10, 4);
  const MatrixXd sigma = ComputeCovariance(param, proxy.points).sigma;
  const double eps = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    VectorXd dir(param.dim());
    for (int i = 0; i < dir.size(); ++i) dir(i) = n(rng);
    dir.normalize();
    const VectorXd diff = (ProjectAll(param.Apply(eps * dir), proxy.points) -
                           ProjectAll(param.Apply(-eps * dir), proxy.points)) /
                          (2 * eps);
    const double quad = dir.dot(sigma * dir);
    CHECK(quad == doctest::Approx(diff.squaredNorm()).epsilon(1e-3));
  }
}

TEST_CASE("on-axis point gives zero focal row and column") {
  const PinholeCamera cam = SimpleCamera(100, 320, 240);
  const Parameterization param(ParamKind{ParamFamily::kSE3Focal}, cam);
  const std::vector<Vec3> points{Vec3(0, 0, 1)};
  const MatrixXd sigma = ComputeCovariance(param, points).sigma;
  CHECK(sigma.row(6).cwiseAbs().maxCoeff() == 0.0);
  CHECK(sigma.col(6).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("preconditioner invariant under point reordering") {
  std::mt19937_64 rng(37);
  const PinholeCamera cam = RandomCamera(rng);
  const Parameterization param(ParamKind{ParamFamily::kSE3FocalIntrinsics}, cam);
  std::vector<Vec3> points = SampleFrustum(cam, 500, 1, 10, 6).points;
  const MatrixXd a = BuildPreconditioner(ComputeCovariance(param, points), 0.1, 1e-8).p_inv;
  std::shuffle(points.begin(), points.end(), rng);
  const MatrixXd b = BuildPreconditioner(ComputeCovariance(param, points), 0.1, 1e-8).p_inv;
  CHECK(MaxAbs(a - b) <= 1e-10 * MaxAbs(a));
}

TEST_CASE("wrapped parameterization") {
  std::mt19937_64 rng(39);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const PinholeCamera cam = RandomCamera(rng);
  const Parameterization param(ParamKind{ParamFamily::kSE3FocalIntrinsics}, cam);
  const PreconditionedParameterization identity(param, MatrixXd::Identity(11, 11));
  for (int trial = 0; trial < 5; ++trial) {
    VectorXd d(11);
    for (int i = 0; i < 11; ++i) d(i) = 1e-2 * u(rng);
    CHECK(MaxAbs(Flatten(identity.Apply(d)) - Flatten(param.Apply(d))) == 0.0);
  }

  const ProxyPointSet proxy = SampleFrustum(cam, 1000, 0.2, 100, 8);
  const Preconditioner precond = BuildPreconditioner(ComputeCovariance(param, proxy.points), 0, 0);
  const PreconditionedParameterization wrapped = Wrap(param, precond);
  CHECK(MaxAbs(Flatten(wrapped.Apply(VectorXd::Zero(11))) - Flatten(cam)) == 0.0);

  VectorXd latent(11);
  for (int i = 0; i < 11; ++i) latent(i) = u(rng);
  CHECK(MaxAbs(Flatten(wrapped.Apply(latent)) - Flatten(param.Apply(precond.p_inv * latent))) ==
        0.0);
  const MatrixXd jw = ProjectionJacobian(wrapped, latent, proxy.points);
  const MatrixXd jp = ProjectionJacobian(param, precond.p_inv * latent, proxy.points);
  CHECK(MaxAbs(jw - jp * precond.p_inv) <= 1e-9 * MaxAbs(jw));

  REQUIRE(precond.clamp_count == 0);
  const MatrixXd gram = ProjectionCovariance(wrapped, VectorXd::Zero(11), proxy.points);
  CHECK(MaxAbs(gram - MatrixXd::Identity(11, 11)) <= 1e-4);

  CHECK_THROWS_AS(wrapped.Apply(VectorXd::Zero(10)), Error);
  CHECK_THROWS_AS(PreconditionedParameterization(param, MatrixXd::Identity(7, 7)), Error);
}

TEST_CASE("motion magnitudes") {
  std::mt19937_64 rng(41);
  const PinholeCamera cam = RandomCamera(rng);
  const Parameterization param(ParamKind{ParamFamily::kSE3Focal}, cam);
  const ProxyPointSet proxy = SampleFrustum(cam, 1000, 1, 10, 10);
  const Covariance cov = ComputeCovariance(param, proxy.points);
  const VectorXd raw = MotionMagnitudes(param, proxy.points);
  CHECK(MaxAbs(raw - (cov.sigma.diagonal() / 1000.0).cwiseSqrt()) <= 1e-12 * MaxAbs(raw));

  const VectorXd white =
      MotionMagnitudes(Wrap(param, BuildPreconditioner(cov, 0, 0)), proxy.points);
  CHECK((white.maxCoeff() - white.minCoeff()) / white.mean() <= 1e-3);
  CHECK(white.mean() == doctest::Approx(1.0 / std::sqrt(1000.0)).epsilon(1e-6));

  const std::vector<Vec3> none;
  try {
    MotionMagnitudes(param, none);
    FAIL("expected EmptyPointSet");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyPointSet);
  }
}

TEST_CASE("json round trip") {
  std::mt19937_64 rng(43);
  const PinholeCamera cam = RandomCamera(rng);
  const Parameterization param(ParamKind{ParamFamily::kFocalPose}, cam);
  const Covariance cov = ComputeCovariance(param, SampleFrustum(cam, 100, 1, 10, 1).points);
  const Preconditioner p = BuildPreconditioner(cov, 0.1, 1e-8);
  const nlohmann::json j = nlohmann::json::parse(ToJson(cov, p).dump());
  CHECK(j["k"] == 7);
  CHECK(j["m"] == 100);
  CHECK(j["kind"] == "focal_pose");
  CHECK(MaxAbs(MatrixFromJson(j["sigma"], 7) - cov.sigma) == 0.0);
  CHECK(MaxAbs(MatrixFromJson(j["p_inv"], 7) - p.p_inv) == 0.0);
}

TEST_CASE("mode names") {
  CHECK(ParsePrecondMode("full") == PrecondMode::kFull);
  CHECK(ParsePrecondMode("diag") == PrecondMode::kDiagonal);
  CHECK(ParsePrecondMode("none") == PrecondMode::kNone);
  CHECK_THROWS_AS(ParsePrecondMode("partial"), Error);
}
