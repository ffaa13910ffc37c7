#include "camcond/harness.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

namespace camcond {

std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<Observation> SyntheticScene::ObservationsFor(size_t camera) const {
  std::vector<Observation> out;
  out.reserve(observations.at(camera).size());
  for (const auto& obs : observations[camera]) {
    out.push_back({points.at(static_cast<size_t>(obs.point_index)), obs.pixel});
  }
  return out;
}

SyntheticScene MakeScene(const SceneConfig& config) {
  if (config.n_cameras < 2) Fail(ErrorCode::kInvalidArgument, "scene needs at least 2 cameras");
  if (config.n_points < 50) Fail(ErrorCode::kInvalidArgument, "scene needs at least 50 points");
  if (config.layout != "ring") {
    Fail(ErrorCode::kConfig, "unknown scene layout '" + config.layout + "'");
  }
  if (!(config.radius > 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "ring radius must exceed the unit point ball");
  }

  SyntheticScene scene;
  scene.seed = config.seed;
  for (int i = 0; i < config.n_cameras; ++i) {
    // Half-spacing phase: no camera sits directly opposite the identity pose,
    // whose rotation angle would be exactly pi.
    const double angle = 2.0 * std::numbers::pi * (i + 0.5) / config.n_cameras;
    const Vec3 position(config.radius * std::sin(angle), 0.0, -config.radius * std::cos(angle));
    PinholeCamera cam;
    cam.fx = cam.fy = config.focal;
    cam.width = config.width;
    cam.height = config.height;
    cam.u0 = 0.5 * config.width;
    cam.v0 = 0.5 * config.height;
    cam.k1 = config.k1;
    cam.k2 = config.k2;
    // World y points down like the image v axis; with a y-up world every
    // level camera would have a rotation angle of exactly pi.
    cam.pose = LookAt(position, Vec3::Zero(), -Vec3::UnitY());
    ValidateCamera(cam);
    scene.gt_cameras.push_back(cam);
  }

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> cube(-1.0, 1.0);
  while (static_cast<int>(scene.points.size()) < config.n_points) {
    const Vec3 p(cube(rng), cube(rng), cube(rng));
    if (p.squaredNorm() <= 1.0) scene.points.push_back(p);
  }

  scene.observations.resize(scene.gt_cameras.size());
  for (size_t c = 0; c < scene.gt_cameras.size(); ++c) {
    const PinholeCamera& cam = scene.gt_cameras[c];
    for (size_t l = 0; l < scene.points.size(); ++l) {
      if (!(cam.pose(scene.points[l]).z() > kMinDepth)) continue;
      const Pixel p = Project(cam, scene.points[l]);
      if (InImage(cam, p)) scene.observations[c].push_back({static_cast<int>(l), p});
    }
    if (static_cast<int>(scene.observations[c].size()) < config.min_visible) {
      Fail(ErrorCode::kInsufficientVisibility,
           "camera " + std::to_string(c) + " observes only " +
               std::to_string(scene.observations[c].size()) + " points");
    }
  }
  return scene;
}

PerturbSpec PerturbPreset(const std::string& name) {
  PerturbSpec spec;
  if (name == "p360") {
    spec.sigma_lookat = 0.005;
    spec.sigma_position = 0.005;
    spec.sigma_focal_log = std::log(1.02);
    spec.sigma_dolly_log = std::log(1.05);
  } else if (name == "psynth") {
    spec.sigma_lookat = 0.1;
    spec.sigma_position = 0.1;
    spec.sigma_focal_log = std::log(1.2);
    spec.sigma_dolly_log = std::log(1.1);
  } else if (name == "psynth-scaled" || name == "psynth_scaled") {
    spec.sigma_lookat = 0.05;
    spec.sigma_position = 0.05;
    spec.sigma_focal_log = std::log(1.05);
    spec.sigma_dolly_log = std::log(1.05);
  } else if (name == "none") {
    spec.sigma_lookat = spec.sigma_position = spec.sigma_focal_log = spec.sigma_dolly_log = 0.0;
    spec.zero_distortion = false;
  } else {
    Fail(ErrorCode::kConfig, "unknown perturbation preset '" + name + "'");
  }
  return spec;
}

std::vector<PinholeCamera> Perturb(const SyntheticScene& scene, const PerturbSpec& spec) {
  if (!(spec.sigma_lookat >= 0.0) || !(spec.sigma_position >= 0.0) ||
      !(spec.sigma_focal_log >= 0.0) || !(spec.sigma_dolly_log >= 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "perturbation standard deviations must be non-negative");
  }
  std::vector<PinholeCamera> out;
  out.reserve(scene.gt_cameras.size());
  for (size_t i = 0; i < scene.gt_cameras.size(); ++i) {
    const PinholeCamera& gt = scene.gt_cameras[i];
    std::mt19937_64 rng(MixSeed(spec.seed, i));
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec3 lookat_offset, position_offset;
    for (int a = 0; a < 3; ++a) lookat_offset(a) = spec.sigma_lookat * normal(rng);
    for (int a = 0; a < 3; ++a) position_offset(a) = spec.sigma_position * normal(rng);
    const double focal_scale = std::exp(spec.sigma_focal_log * normal(rng));
    const double dolly_scale = std::exp(spec.sigma_dolly_log * normal(rng));

    PinholeCamera cam = gt;
    const Vec3 center = CameraCenter(gt);
    const Vec3 forward = gt.pose.rotation.row(2).transpose();
    // Look-at point: the optical-axis point closest to the scene center.
    const Vec3 target = center + forward * forward.dot(-center);
    const Vec3 new_center = (center + position_offset) * dolly_scale;
    if (lookat_offset.isZero(0.0) && position_offset.isZero(0.0)) {
      if (dolly_scale != 1.0) cam.pose.translation = -(cam.pose.rotation * new_center);
    } else {
      const Vec3 up = -gt.pose.rotation.row(1).transpose();
      cam.pose = LookAt(new_center, target + lookat_offset, up);
    }
    cam.fx = gt.fx * focal_scale * dolly_scale;
    cam.fy = gt.fy * focal_scale * dolly_scale;
    if (spec.zero_distortion) {
      cam.k1 = 0.0;
      cam.k2 = 0.0;
    }
    out.push_back(cam);
  }
  return out;
}

CameraMetrics ComputeCameraMetrics(const PinholeCamera& gt, const PinholeCamera& est) {
  CameraMetrics m;
  m.rotation_err_deg =
      RotationAngle(gt.pose.rotation * est.pose.rotation.transpose()) * 180.0 / std::numbers::pi;
  m.position_err = (CameraCenter(gt) - CameraCenter(est)).norm();
  m.focal_err_px = 0.5 * (std::abs(gt.fx - est.fx) + std::abs(gt.fy - est.fy));
  return m;
}

CameraMetrics MeanMetrics(const std::vector<CameraMetrics>& metrics) {
  CameraMetrics mean;
  if (metrics.empty()) return mean;
  for (const auto& m : metrics) {
    mean.rotation_err_deg += m.rotation_err_deg;
    mean.position_err += m.position_err;
    mean.focal_err_px += m.focal_err_px;
  }
  const double n = static_cast<double>(metrics.size());
  mean.rotation_err_deg /= n;
  mean.position_err /= n;
  mean.focal_err_px /= n;
  return mean;
}

double SceneMSE(const SyntheticScene& scene, const std::vector<PinholeCamera>& cameras) {
  double sum = 0.0;
  for (size_t i = 0; i < cameras.size(); ++i) {
    sum += ReprojectionMSE(cameras[i], scene.ObservationsFor(i));
  }
  return sum / static_cast<double>(cameras.size());
}

namespace {

// Per-camera optimization state.
struct CameraSlot {
  std::unique_ptr<Parameterization> param;
  std::unique_ptr<PreconditionedParameterization> wrapped;
  std::vector<Observation> observations;
  VectorXd latent;
  AdamState adam;

  const CameraMap& map() const {
    return wrapped ? static_cast<const CameraMap&>(*wrapped) : *param;
  }
};

void Rebase(CameraSlot& slot, const PinholeCamera& base, const RefineConfig& config,
            std::uint64_t proxy_seed, int* clamp_count) {
  slot.param = std::make_unique<Parameterization>(config.kind, base);
  slot.wrapped.reset();
  const int k = slot.param->dim();
  if (config.mode != PrecondMode::kNone) {
    MatrixXd p_inv;
    if (config.precond.force_identity) {
      p_inv = MatrixXd::Identity(k, k);
    } else {
      const ProxyPointSet proxy =
          SampleFrustum(base, config.proxy.m, config.proxy.near, config.proxy.far, proxy_seed);
      const Covariance cov = ComputeCovariance(*slot.param, proxy.points);
      const Preconditioner precond =
          BuildPreconditioner(cov, config.precond.lambda, config.precond.mu, config.mode);
      *clamp_count += precond.clamp_count;
      p_inv = precond.p_inv;
    }
    slot.wrapped = std::make_unique<PreconditionedParameterization>(*slot.param, p_inv);
  }
  slot.latent = VectorXd::Zero(k);
  slot.adam = AdamState(k);
}

}  // namespace

RefineResult Refine(const SyntheticScene& scene, const std::vector<PinholeCamera>& initial,
                    const RefineConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (initial.size() != scene.gt_cameras.size()) {
    Fail(ErrorCode::kDimensionMismatch, "one initial camera per scene camera required");
  }
  if (config.opt.steps <= 0) Fail(ErrorCode::kInvalidArgument, "opt.steps must be positive");
  if (config.log_every <= 0) Fail(ErrorCode::kInvalidArgument, "log_every must be positive");
  const size_t n = initial.size();
  const int total = config.opt.steps;

  RefineResult result;
  std::vector<CameraSlot> slots(n);
  std::vector<std::uint64_t> proxy_seeds(n);
  for (size_t i = 0; i < n; ++i) {
    proxy_seeds[i] = MixSeed(MixSeed(config.proxy.seed, config.seed), i);
    slots[i].observations = scene.ObservationsFor(i);
    Rebase(slots[i], initial[i], config, proxy_seeds[i], &result.clamp_count);
  }

  std::vector<PinholeCamera> current = initial;
  auto record = [&](int step, double mse) {
    std::vector<CameraMetrics> metrics(n);
    for (size_t i = 0; i < n; ++i) metrics[i] = ComputeCameraMetrics(scene.gt_cameras[i], current[i]);
    result.trajectory.push_back({step, mse, MeanMetrics(metrics)});
    result.final_metrics = std::move(metrics);
  };

  int step = 0;
  try {
    std::vector<VectorXd> grads(n);
    std::vector<CameraFieldJacobian> field_jacs(n);
    for (; step < total; ++step) {
      if (config.precond.recompute_every > 0 && config.mode != PrecondMode::kNone && step > 0 &&
          step % config.precond.recompute_every == 0) {
        for (size_t i = 0; i < n; ++i) {
          Rebase(slots[i], current[i], config, proxy_seeds[i], &result.clamp_count);
        }
      }
      double mse = 0.0;
      for (size_t i = 0; i < n; ++i) {
        const LossAndGradient lg =
            ReprojectionLossGradient(slots[i].map(), slots[i].latent, slots[i].observations);
        mse += lg.loss;
        grads[i] = lg.gradient / static_cast<double>(n);
        if (config.opt.shared_loss) {
          field_jacs[i] = slots[i].map().FieldJacobian(slots[i].latent, &current[i]);
        } else {
          current[i] = slots[i].map().Apply(slots[i].latent);
        }
      }
      mse /= static_cast<double>(n);
      if (step % config.log_every == 0) record(step, mse);

      if (config.opt.shared_loss) {
        std::vector<Intrinsics> intrinsics(n);
        for (size_t i = 0; i < n; ++i) {
          intrinsics[i] << current[i].fx, current[i].fy, current[i].u0, current[i].v0,
              current[i].k1, current[i].k2;
        }
        const SharedLoss shared = SharedIntrinsicsLoss(intrinsics, config.opt.shared_weights);
        for (size_t i = 0; i < n; ++i) {
          grads[i] += field_jacs[i].topRows<6>().transpose() * shared.gradients[i];
        }
      }

      const double lr = LearningRate(config.opt.schedule, step, total);
      for (size_t i = 0; i < n; ++i) {
        AdamStep(slots[i].adam, config.opt.adam, slots[i].latent, grads[i], lr);
      }
    }
    for (size_t i = 0; i < n; ++i) current[i] = slots[i].map().Apply(slots[i].latent);
    record(total, SceneMSE(scene, current));
  } catch (const Error& e) {
    result.failed = true;
    result.fail_step = step;
    result.error = e.what();
    if (result.trajectory.empty() || result.trajectory.back().step != step) {
      double mse = std::numeric_limits<double>::quiet_NaN();
      try {
        mse = SceneMSE(scene, current);
      } catch (const Error&) {
      }
      record(step, mse);
    }
  }
  result.final_cameras = current;
  result.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

SyntheticScene ArmScene(const ExperimentConfig& config, std::uint64_t seed) {
  SceneConfig scene = config.scene;
  scene.seed = MixSeed(config.scene.seed, seed);
  return MakeScene(scene);
}

std::vector<PinholeCamera> ArmInitialCameras(const ExperimentConfig& config,
                                             const SyntheticScene& scene, std::uint64_t seed) {
  PerturbSpec spec = config.perturb;
  spec.seed = MixSeed(config.perturb.seed, seed);
  return Perturb(scene, spec);
}

std::vector<ArmResult> RunGrid(const ExperimentConfig& config, int jobs) {
  std::vector<ArmResult> arms;
  for (const ParamKind& kind : config.kinds) {
    for (PrecondMode mode : config.modes) {
      for (std::uint64_t seed : config.seeds) {
        ArmResult arm;
        arm.kind = kind;
        arm.mode = mode;
        arm.seed = seed;
        arm.id = ToString(kind) + "_" + ToString(mode) + "_s" + std::to_string(seed);
        arms.push_back(std::move(arm));
      }
    }
  }

  auto run_arm = [&config](ArmResult& arm) {
    const SyntheticScene scene = ArmScene(config, arm.seed);
    const std::vector<PinholeCamera> initial = ArmInitialCameras(config, scene, arm.seed);
    std::vector<CameraMetrics> init_metrics;
    for (size_t i = 0; i < initial.size(); ++i) {
      init_metrics.push_back(ComputeCameraMetrics(scene.gt_cameras[i], initial[i]));
    }
    arm.initial_metrics = MeanMetrics(init_metrics);
    RefineConfig rc;
    rc.kind = arm.kind;
    rc.mode = arm.mode;
    rc.proxy = config.proxy;
    rc.opt = config.opt;
    rc.precond = config.precond;
    rc.log_every = config.log_every;
    rc.seed = arm.seed;
    arm.result = Refine(scene, initial, rc);
  };

  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(arms.size())));
  if (jobs == 1) {
    for (auto& arm : arms) run_arm(arm);
    return arms;
  }
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(arms.size());
  {
    std::vector<std::jthread> workers;
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (size_t a = next++; a < arms.size(); a = next++) {
          try {
            run_arm(arms[a]);
          } catch (...) {
            errors[a] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return arms;
}

}  // namespace camcond
