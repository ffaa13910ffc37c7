#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "camcond/camera.h"
#include "camcond/derivatives.h"
#include "camcond/optimizer.h"
#include "camcond/parameterization.h"
#include "camcond/preconditioner.h"
#include "camcond/sampler.h"

namespace camcond {

// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b);

struct SceneConfig {
  int n_cameras = 20;
  int n_points = 500;
  std::string layout = "ring";
  std::uint64_t seed = 0;
  int width = 640;
  int height = 480;
  double focal = 800.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double radius = 4.0;
  // Every camera must observe at least this many points.
  int min_visible = 2 * kMaxDim;
};

struct ViewObservation {
  int point_index = 0;
  Pixel pixel;
};

struct SyntheticScene {
  std::vector<PinholeCamera> gt_cameras;
  std::vector<Vec3> points;
  std::vector<std::vector<ViewObservation>> observations;
  std::uint64_t seed = 0;

  std::vector<Observation> ObservationsFor(size_t camera) const;
};

// Ring of cameras at `radius` around the origin looking inward, world y axis
// pointing down (image-aligned), with points uniform in the unit ball.
SyntheticScene MakeScene(const SceneConfig& config);

struct PerturbSpec {
  double sigma_lookat = 0.05;
  double sigma_position = 0.05;
  double sigma_focal_log = 0.04879016416943205;  // ln 1.05
  double sigma_dolly_log = 0.04879016416943205;  // ln 1.05
  bool zero_distortion = true;
  std::uint64_t seed = 0;
};

// Named presets: "p360", "psynth", "psynth-scaled" (the desk-scale default).
PerturbSpec PerturbPreset(const std::string& name);

std::vector<PinholeCamera> Perturb(const SyntheticScene& scene, const PerturbSpec& spec);

struct CameraMetrics {
  double rotation_err_deg = 0.0;
  double position_err = 0.0;
  double focal_err_px = 0.0;
};

CameraMetrics ComputeCameraMetrics(const PinholeCamera& gt, const PinholeCamera& est);
CameraMetrics MeanMetrics(const std::vector<CameraMetrics>& metrics);

struct ProxyConfig {
  int m = kDefaultProxyPoints;
  double near = kDefaultProxyNear;
  double far = kDefaultProxyFar;
  std::uint64_t seed = 0;
};

struct OptConfig {
  // Learning rates are in latent units; see README for the scale.
  Schedule schedule{1000.0, 100.0, 100, 1e-8};
  AdamConfig adam;
  int steps = 2000;
  bool shared_loss = false;
  SharedWeights shared_weights;
};

struct PrecondConfig {
  double lambda = kDefaultLambda;
  double mu = kDefaultMu;
  // Rebase and rebuild the preconditioner every N steps; 0 keeps it frozen.
  int recompute_every = 0;
  // Use P_inv = I regardless of the covariance (wrapper neutrality checks).
  bool force_identity = false;
};

struct RefineConfig {
  ParamKind kind{ParamFamily::kFocalPoseIntrinsics};
  PrecondMode mode = PrecondMode::kFull;
  ProxyConfig proxy;
  OptConfig opt;
  PrecondConfig precond;
  int log_every = 100;
  std::uint64_t seed = 0;
};

struct TrajectoryPoint {
  int step = 0;
  double mse = 0.0;
  CameraMetrics metrics;
};

struct RefineResult {
  std::vector<TrajectoryPoint> trajectory;
  std::vector<PinholeCamera> final_cameras;
  std::vector<CameraMetrics> final_metrics;
  int clamp_count = 0;
  bool failed = false;
  int fail_step = -1;
  std::string error;
  double wall_ms = 0.0;

  const TrajectoryPoint& final_point() const { return trajectory.back(); }
};

// Mean over cameras of the per-camera reprojection MSE.
double SceneMSE(const SyntheticScene& scene, const std::vector<PinholeCamera>& cameras);

RefineResult Refine(const SyntheticScene& scene, const std::vector<PinholeCamera>& initial,
                    const RefineConfig& config);

struct ExperimentConfig {
  SceneConfig scene;
  PerturbSpec perturb;
  // Depth bounds default to the ring scene's depth range.
  ProxyConfig proxy{kDefaultProxyPoints, 3.0, 5.0, 0};
  OptConfig opt;
  PrecondConfig precond;
  std::vector<ParamKind> kinds{ParamKind{ParamFamily::kFocalPoseIntrinsics}};
  std::vector<PrecondMode> modes{PrecondMode::kNone, PrecondMode::kFull};
  std::vector<std::uint64_t> seeds{0};
  int log_every = 100;
};

struct ArmResult {
  std::string id;
  ParamKind kind;
  PrecondMode mode = PrecondMode::kNone;
  std::uint64_t seed = 0;
  CameraMetrics initial_metrics;
  RefineResult result;
};

// Scene, perturbation and proxy seeds for one experiment seed.
SyntheticScene ArmScene(const ExperimentConfig& config, std::uint64_t seed);
std::vector<PinholeCamera> ArmInitialCameras(const ExperimentConfig& config,
                                             const SyntheticScene& scene, std::uint64_t seed);

// Runs kinds x modes x seeds on up to `jobs` threads. Output order follows the
// grid order and does not depend on `jobs`.
std::vector<ArmResult> RunGrid(const ExperimentConfig& config, int jobs);

}  // namespace camcond
