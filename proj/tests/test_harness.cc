#include <cmath>
#include <numbers>

#include "doctest.h"
#include "test_util.h"

using namespace camcond;
using camcond::testing::MaxAbs;

namespace {

SceneConfig SmallScene() {
  SceneConfig c;
  c.n_cameras = 6;
  c.n_points = 200;
  c.seed = 3;
  return c;
}

}  // namespace

TEST_CASE("ring scene construction") {
  SceneConfig c = SmallScene();
  c.n_cameras = 4;
  const SyntheticScene scene = MakeScene(c);
  REQUIRE(scene.gt_cameras.size() == 4);
  for (size_t i = 0; i < 2; ++i) {
    const Mat3 rel = scene.gt_cameras[i].pose.rotation *
                     scene.gt_cameras[i + 2].pose.rotation.transpose();
    CHECK(RotationAngle(rel) * 180.0 / std::numbers::pi == doctest::Approx(180.0).epsilon(1e-9));
    // The relative rotation is about the world vertical.
    const Mat3 world_rel = scene.gt_cameras[i].pose.rotation.transpose() *
                           scene.gt_cameras[i + 2].pose.rotation;
    CHECK(std::abs((world_rel * Vec3::UnitY()).dot(Vec3::UnitY()) - 1.0) <= 1e-12);
  }
  for (const PinholeCamera& cam : scene.gt_cameras) {
    CHECK(CameraCenter(cam).norm() == doctest::Approx(c.radius));
  }
}

TEST_CASE("observations reproject exactly under ground truth") {
  const SyntheticScene scene = MakeScene(SmallScene());
  double worst = 0.0;
  for (size_t i = 0; i < scene.gt_cameras.size(); ++i) {
    CHECK(scene.observations[i].size() >= 30);
    for (const Observation& o : scene.ObservationsFor(i)) {
      worst = std::max(worst, (Project(scene.gt_cameras[i], o.point) - o.pixel).norm());
      CHECK(InImage(scene.gt_cameras[i], o.pixel));
    }
  }
  CHECK(worst <= 1e-10);
  CHECK(SceneMSE(scene, scene.gt_cameras) == 0.0);
  for (const Vec3& x : scene.points) CHECK(x.norm() <= 1.0);
}

TEST_CASE("scene generation is deterministic") {
  const SyntheticScene a = MakeScene(SmallScene());
  const SyntheticScene b = MakeScene(SmallScene());
  CHECK(a.points == b.points);
  for (size_t i = 0; i < a.gt_cameras.size(); ++i) {
    CHECK(Flatten(a.gt_cameras[i]) == Flatten(b.gt_cameras[i]));
  }
  SceneConfig other = SmallScene();
  other.seed = 4;
  CHECK(MakeScene(other).points != a.points);
}

TEST_CASE("zero perturbation leaves cameras unchanged") {
  const SyntheticScene scene = MakeScene(SmallScene());
  PerturbSpec spec = PerturbPreset("none");
  spec.zero_distortion = false;
  const std::vector<PinholeCamera> out = Perturb(scene, spec);
  for (size_t i = 0; i < out.size(); ++i) {
    CHECK(Flatten(out[i]) == Flatten(scene.gt_cameras[i]));
  }
}

TEST_CASE("dolly-only perturbation keeps focal and distance scale equal") {
  const SyntheticScene scene = MakeScene(SmallScene());
  PerturbSpec spec = PerturbPreset("none");
  spec.sigma_dolly_log = 0.1;
  spec.seed = 5;
  const std::vector<PinholeCamera> out = Perturb(scene, spec);
  for (size_t i = 0; i < out.size(); ++i) {
    const double focal_scale = out[i].fx / scene.gt_cameras[i].fx;
    const double distance_scale = CameraCenter(out[i]).norm() / CameraCenter(scene.gt_cameras[i]).norm();
    CHECK(focal_scale / distance_scale == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(focal_scale != 1.0);
    CHECK(MaxAbs(out[i].pose.rotation - scene.gt_cameras[i].pose.rotation) == 0.0);
  }
}

TEST_CASE("p360 perturbation magnitude") {
  SceneConfig c = SmallScene();
  c.n_cameras = 40;
  const SyntheticScene scene = MakeScene(c);
  PerturbSpec spec = PerturbPreset("p360");
  spec.seed = 1;
  const std::vector<PinholeCamera> out = Perturb(scene, spec);
  std::vector<CameraMetrics> m;
  for (size_t i = 0; i < out.size(); ++i) m.push_back(ComputeCameraMetrics(scene.gt_cameras[i], out[i]));
  const CameraMetrics mean = MeanMetrics(m);
  // Combined focal and dolly log sigma is about 5.4%; mean |N| is 0.8 sigma.
  const double relative = mean.focal_err_px / c.focal;
  CHECK(relative > 0.02);
  CHECK(relative < 0.08);
  CHECK(mean.rotation_err_deg > 0.0);
  CHECK(mean.position_err > 0.0);
}

TEST_CASE("perturbation presets") {
  CHECK(PerturbPreset("psynth").sigma_position == 0.1);
  CHECK(PerturbPreset("psynth-scaled").zero_distortion);
  CHECK_THROWS_AS(PerturbPreset("bogus"), Error);
}

TEST_CASE("camera metrics") {
  const SyntheticScene scene = MakeScene(SmallScene());
  const PinholeCamera& gt = scene.gt_cameras[0];
  const CameraMetrics same = ComputeCameraMetrics(gt, gt);
  CHECK(same.rotation_err_deg == 0.0);
  CHECK(same.position_err == 0.0);
  CHECK(same.focal_err_px == 0.0);

  PinholeCamera rotated = gt;
  const Vec3 up_cam = gt.pose.rotation * Vec3::UnitY();
  rotated.pose.rotation = ExpSO3<double>(Vec3(up_cam * std::numbers::pi / 2)) * gt.pose.rotation;
  CHECK(ComputeCameraMetrics(gt, rotated).rotation_err_deg == doctest::Approx(90.0).epsilon(1e-11));

  PinholeCamera f = gt;
  f.fx = f.fy = 1000;
  PinholeCamera g = f;
  g.fx = g.fy = 1020;
  CHECK(ComputeCameraMetrics(f, g).focal_err_px == doctest::Approx(20.0));
}

TEST_CASE("refinement from ground truth is stationary") {
  const SyntheticScene scene = MakeScene(SmallScene());
  for (const PrecondMode mode : {PrecondMode::kNone, PrecondMode::kFull}) {
    RefineConfig rc;
    rc.mode = mode;
    rc.opt.steps = 200;
    rc.proxy.near = 3;
    rc.proxy.far = 5;
    const RefineResult r = Refine(scene, scene.gt_cameras, rc);
    CHECK_FALSE(r.failed);
    CHECK(r.final_point().mse == 0.0);
    CHECK(r.final_point().metrics.rotation_err_deg == 0.0);
  }
}

TEST_CASE("full preconditioning reduces the error on a small problem") {
  SceneConfig c = SmallScene();
  const SyntheticScene scene = MakeScene(c);
  PerturbSpec spec = PerturbPreset("psynth-scaled");
  spec.seed = 2;
  const std::vector<PinholeCamera> start = Perturb(scene, spec);
  RefineConfig rc;
  rc.opt.steps = 300;
  rc.proxy.near = 3;
  rc.proxy.far = 5;
  const RefineResult r = Refine(scene, start, rc);
  REQUIRE_FALSE(r.failed);
  CHECK(r.final_point().mse < 1e-2 * r.trajectory.front().mse);
  CHECK(r.trajectory.front().step == 0);
  CHECK(r.final_point().step == 300);
  CHECK(r.trajectory.size() == 4);
}

TEST_CASE("grid results do not depend on the worker count") {
  ExperimentConfig ex;
  ex.scene = SmallScene();
  ex.opt.steps = 50;
  ex.seeds = {0, 1};
  ex.modes = {PrecondMode::kNone, PrecondMode::kDiagonal, PrecondMode::kFull};
  const std::vector<ArmResult> a = RunGrid(ex, 1);
  const std::vector<ArmResult> b = RunGrid(ex, 3);
  REQUIRE(a.size() == 6);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == b[i].id);
    CHECK(a[i].result.final_point().mse == b[i].result.final_point().mse);
  }
  CHECK(a[0].id == "focal_pose_intrinsics_none_s0");
}

TEST_CASE("mix seed") {
  CHECK(MixSeed(0, 0) != MixSeed(0, 1));
  CHECK(MixSeed(1, 0) != MixSeed(0, 1));
  CHECK(MixSeed(7, 9) == MixSeed(7, 9));
}
