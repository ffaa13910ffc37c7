#include "camcond/config.h"

#include <fstream>
#include <sstream>

namespace camcond {

using nlohmann::json;

json DefaultConfigJson() {
  return json{
      {"scene",
       {{"n_cameras", 20},
        {"n_points", 500},
        {"layout", "ring"},
        {"seed", 0},
        {"width", 640},
        {"height", 480},
        {"focal", 800.0},
        {"k1", 0.0},
        {"k2", 0.0},
        {"radius", 4.0}}},
      {"perturb",
       {{"preset", "psynth-scaled"},
        {"sigma_lookat", nullptr},
        {"sigma_position", nullptr},
        {"sigma_focal_log", nullptr},
        {"sigma_dolly_log", nullptr},
        {"zero_distortion", nullptr},
        {"seed", 0}}},
      {"proxy", {{"m", kDefaultProxyPoints}, {"near", 3.0}, {"far", 5.0}, {"seed", 0}}},
      {"opt",
       {{"lr_start", 1000.0},
        {"lr_end", 100.0},
        {"warmup_steps", 100},
        {"warmup_floor", 1e-8},
        {"steps", 2000},
        {"beta1", 0.9},
        {"beta2", 0.999},
        {"eps", 1e-8},
        {"shared_loss", false},
        {"shared_weights", {{"focal", 1e-1}, {"principal", 1e-2}, {"distortion", 1e-2}}}}},
      {"precond", {{"lambda", kDefaultLambda}, {"mu", kDefaultMu}, {"recompute_every", 0}}},
      {"experiment",
       {{"kinds", {"focal_pose_intrinsics"}},
        {"modes", {"none", "full"}},
        {"seeds", {0}},
        {"log_every", 100}}},
      {"camera",
       {{"kind", "se3_focal"},
        {"fx", 800.0},
        {"fy", 800.0},
        {"u0", 320.0},
        {"v0", 240.0},
        {"k1", 0.0},
        {"k2", 0.0},
        {"width", 640},
        {"height", 480},
        {"position", {0.0, 0.0, -4.0}},
        {"look_at", {0.0, 0.0, 0.0}},
        {"up", {0.0, -1.0, 0.0}}}},
  };
}

namespace {

[[noreturn]] void ConfigFail(const std::string& message) { Fail(ErrorCode::kConfig, message); }

void CheckKnownKeys(const json& user, const json& defaults, const std::string& path) {
  if (!user.is_object()) ConfigFail("'" + path + "' must be an object");
  for (const auto& [key, value] : user.items()) {
    const std::string here = path.empty() ? key : path + "." + key;
    if (!defaults.contains(key)) ConfigFail("unknown config key '" + here + "'");
    const json& def = defaults.at(key);
    if (def.is_object()) CheckKnownKeys(value, def, here);
  }
}

template <typename T>
T Get(const json& tree, const std::string& section, const std::string& key) {
  const json& v = tree.at(section).at(key);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    ConfigFail("bad value for '" + section + "." + key + "': " + v.dump());
  }
}

double Positive(const json& tree, const std::string& section, const std::string& key) {
  const double v = Get<double>(tree, section, key);
  if (!(v > 0.0)) ConfigFail("'" + section + "." + key + "' must be positive");
  return v;
}

double NonNegative(const json& tree, const std::string& section, const std::string& key) {
  const double v = Get<double>(tree, section, key);
  if (!(v >= 0.0)) ConfigFail("'" + section + "." + key + "' must be non-negative");
  return v;
}

int AtLeast(const json& tree, const std::string& section, const std::string& key, int lo) {
  const json& v = tree.at(section).at(key);
  if (!v.is_number_integer()) ConfigFail("'" + section + "." + key + "' must be an integer");
  const int i = v.get<int>();
  if (i < lo) ConfigFail("'" + section + "." + key + "' must be >= " + std::to_string(lo));
  return i;
}

Vec3 GetVec3(const json& tree, const std::string& section, const std::string& key) {
  const auto values = Get<std::vector<double>>(tree, section, key);
  if (values.size() != 3) ConfigFail("'" + section + "." + key + "' must have 3 entries");
  return {values[0], values[1], values[2]};
}

// Runs a library validation step, reporting failures as config errors.
template <typename Fn>
auto AsConfig(const std::string& what, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    ConfigFail(what + ": " + e.what());
  }
}

}  // namespace

void ApplyOverride(json& tree, const std::string& dotted_key, const std::string& value) {
  json* node = &tree;
  std::stringstream ss(dotted_key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) ConfigFail("empty override key");
  for (size_t i = 0; i + 1 < parts.size(); ++i) {
    json& child = (*node)[parts[i]];
    if (child.is_null()) child = json::object();
    node = &child;
  }
  json parsed = json::parse(value, nullptr, false);
  (*node)[parts.back()] = parsed.is_discarded() ? json(value) : parsed;
}

json LoadConfigTree(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& overrides) {
  json tree = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) ConfigFail("cannot open config file '" + path + "'");
    tree = json::parse(in, nullptr, false);
    if (tree.is_discarded()) ConfigFail("config file '" + path + "' is not valid JSON");
  }
  for (const auto& [key, value] : overrides) ApplyOverride(tree, key, value);
  return tree;
}

RunConfig ParseRunConfig(const json& user) {
  const json defaults = DefaultConfigJson();
  CheckKnownKeys(user, defaults, "");
  json tree = defaults;
  tree.merge_patch(user);
  // merge_patch drops keys whose value is null; restore them so lookups work.
  for (const auto& [section, body] : defaults.items()) {
    for (const auto& [key, value] : body.items()) {
      if (!tree[section].contains(key)) tree[section][key] = value;
    }
  }

  RunConfig rc;
  ExperimentConfig& ex = rc.experiment;

  SceneConfig& sc = ex.scene;
  sc.n_cameras = AtLeast(tree, "scene", "n_cameras", 2);
  sc.n_points = AtLeast(tree, "scene", "n_points", 50);
  sc.layout = Get<std::string>(tree, "scene", "layout");
  if (sc.layout != "ring") ConfigFail("scene.layout must be 'ring'");
  sc.seed = Get<std::uint64_t>(tree, "scene", "seed");
  sc.width = AtLeast(tree, "scene", "width", 1);
  sc.height = AtLeast(tree, "scene", "height", 1);
  sc.focal = Positive(tree, "scene", "focal");
  sc.k1 = Get<double>(tree, "scene", "k1");
  sc.k2 = Get<double>(tree, "scene", "k2");
  sc.radius = Get<double>(tree, "scene", "radius");
  if (!(sc.radius > 1.0)) ConfigFail("scene.radius must exceed 1 (the point ball radius)");

  const std::string preset = Get<std::string>(tree, "perturb", "preset");
  ex.perturb = AsConfig("perturb.preset", [&] { return PerturbPreset(preset); });
  auto sigma = [&](const char* key, double* out) {
    if (!tree["perturb"][key].is_null()) *out = NonNegative(tree, "perturb", key);
  };
  sigma("sigma_lookat", &ex.perturb.sigma_lookat);
  sigma("sigma_position", &ex.perturb.sigma_position);
  sigma("sigma_focal_log", &ex.perturb.sigma_focal_log);
  sigma("sigma_dolly_log", &ex.perturb.sigma_dolly_log);
  if (!tree["perturb"]["zero_distortion"].is_null()) {
    ex.perturb.zero_distortion = Get<bool>(tree, "perturb", "zero_distortion");
  }
  ex.perturb.seed = Get<std::uint64_t>(tree, "perturb", "seed");

  ex.proxy.m = AtLeast(tree, "proxy", "m", 1);
  ex.proxy.near = Positive(tree, "proxy", "near");
  ex.proxy.far = Positive(tree, "proxy", "far");
  if (!(ex.proxy.near < ex.proxy.far)) ConfigFail("proxy.near must be smaller than proxy.far");
  ex.proxy.seed = Get<std::uint64_t>(tree, "proxy", "seed");

  OptConfig& opt = ex.opt;
  opt.schedule.lr_start = Positive(tree, "opt", "lr_start");
  opt.schedule.lr_end = Positive(tree, "opt", "lr_end");
  opt.schedule.warmup_steps = AtLeast(tree, "opt", "warmup_steps", 0);
  opt.schedule.warmup_floor = NonNegative(tree, "opt", "warmup_floor");
  opt.steps = AtLeast(tree, "opt", "steps", 1);
  opt.adam.beta1 = NonNegative(tree, "opt", "beta1");
  opt.adam.beta2 = NonNegative(tree, "opt", "beta2");
  if (!(opt.adam.beta1 < 1.0) || !(opt.adam.beta2 < 1.0)) {
    ConfigFail("opt.beta1 and opt.beta2 must be below 1");
  }
  opt.adam.eps = Positive(tree, "opt", "eps");
  opt.shared_loss = Get<bool>(tree, "opt", "shared_loss");
  opt.shared_weights.focal = NonNegative(tree["opt"], "shared_weights", "focal");
  opt.shared_weights.principal = NonNegative(tree["opt"], "shared_weights", "principal");
  opt.shared_weights.distortion = NonNegative(tree["opt"], "shared_weights", "distortion");

  ex.precond.lambda = NonNegative(tree, "precond", "lambda");
  ex.precond.mu = NonNegative(tree, "precond", "mu");
  ex.precond.recompute_every = AtLeast(tree, "precond", "recompute_every", 0);

  ex.kinds.clear();
  for (const auto& name : Get<std::vector<std::string>>(tree, "experiment", "kinds")) {
    ex.kinds.push_back(ParseParamKind(name));
  }
  ex.modes.clear();
  for (const auto& name : Get<std::vector<std::string>>(tree, "experiment", "modes")) {
    ex.modes.push_back(ParsePrecondMode(name));
  }
  ex.seeds = Get<std::vector<std::uint64_t>>(tree, "experiment", "seeds");
  if (ex.kinds.empty() || ex.modes.empty() || ex.seeds.empty()) {
    ConfigFail("experiment.kinds, modes and seeds must be non-empty");
  }
  ex.log_every = AtLeast(tree, "experiment", "log_every", 1);

  CameraSpec& cs = rc.camera;
  cs.kind = ParseParamKind(Get<std::string>(tree, "camera", "kind"));
  PinholeCamera& cam = cs.camera;
  cam.fx = Positive(tree, "camera", "fx");
  cam.fy = Positive(tree, "camera", "fy");
  cam.u0 = Get<double>(tree, "camera", "u0");
  cam.v0 = Get<double>(tree, "camera", "v0");
  cam.k1 = Get<double>(tree, "camera", "k1");
  cam.k2 = Get<double>(tree, "camera", "k2");
  cam.width = AtLeast(tree, "camera", "width", 1);
  cam.height = AtLeast(tree, "camera", "height", 1);
  const Vec3 position = GetVec3(tree, "camera", "position");
  const Vec3 look_at = GetVec3(tree, "camera", "look_at");
  const Vec3 up = GetVec3(tree, "camera", "up");
  cam.pose = AsConfig("camera pose", [&] { return LookAt(position, look_at, up); });
  AsConfig("camera", [&] {
    ValidateCamera(cam);
    return Parameterization(cs.kind, cam).dim();
  });
  return rc;
}

}  // namespace camcond
