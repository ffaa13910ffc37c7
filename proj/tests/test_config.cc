#include "camcond/config.h"
#include "doctest.h"

using namespace camcond;
using nlohmann::json;

namespace {

ErrorCode CodeOf(const json& user) {
  try {
    ParseRunConfig(user);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a config error");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("defaults parse") {
  const RunConfig rc = ParseRunConfig(json::object());
  CHECK(rc.experiment.scene.n_cameras == 20);
  CHECK(rc.experiment.opt.steps == 2000);
  CHECK(rc.experiment.precond.lambda == 0.1);
  CHECK(rc.experiment.proxy.near == 3.0);
  CHECK(rc.experiment.perturb.sigma_position == 0.05);
  CHECK(rc.camera.kind == ParamKind{ParamFamily::kSE3Focal});
  CHECK(rc.camera.camera.width == 640);
  CHECK(ParseRunConfig(DefaultConfigJson()).experiment.opt.schedule.lr_start == 1000.0);
}

TEST_CASE("overrides") {
  json tree = json::object();
  ApplyOverride(tree, "opt.steps", "500");
  ApplyOverride(tree, "experiment.kinds", "[\"se3\", \"scnerf+log\"]");
  ApplyOverride(tree, "perturb.preset", "p360");
  ApplyOverride(tree, "opt.shared_weights.focal", "0.5");
  const RunConfig rc = ParseRunConfig(tree);
  CHECK(rc.experiment.opt.steps == 500);
  REQUIRE(rc.experiment.kinds.size() == 2);
  CHECK(rc.experiment.kinds[1] == ParamKind{ParamFamily::kSCNeRF, false, true});
  CHECK(rc.experiment.perturb.sigma_lookat == 0.005);
  CHECK(rc.experiment.opt.shared_weights.focal == 0.5);
}

TEST_CASE("sigma overrides apply on top of the preset") {
  const RunConfig rc = ParseRunConfig(json{{"perturb", {{"preset", "psynth"}, {"sigma_position", 0.0}}}});
  CHECK(rc.experiment.perturb.sigma_position == 0.0);
  CHECK(rc.experiment.perturb.sigma_lookat == 0.1);
}

TEST_CASE("unknown keys are rejected") {
  CHECK(CodeOf(json{{"optimizer", json::object()}}) == ErrorCode::kConfig);
  CHECK(CodeOf(json{{"opt", {{"stepz", 3}}}}) == ErrorCode::kConfig);
  CHECK(CodeOf(json{{"opt", {{"shared_weights", {{"foo", 1}}}}}}) == ErrorCode::kConfig);
  CHECK(CodeOf(json::array()) == ErrorCode::kConfig);
}

TEST_CASE("values are validated") {
  CHECK(CodeOf(json{{"opt", {{"steps", 0}}}}) == ErrorCode::kConfig);
  CHECK(CodeOf(json{{"opt", {{"steps", "many"}}}}) == ErrorCode::kConfig);
  CHECK(CodeOf(json{{"opt", {{"steps", 2.5}}}}) == ErrorCode::kConfig);
  CHECK(CodeOf(json{{"proxy", {{"near", 5}, {"far", 5}}}}) == ErrorCode::kConfig);
  CHECK(CodeOf(json{{"precond", {{"lambda", -1}}}}) == ErrorCode::kConfig);
  CHECK(CodeOf(json{{"experiment", {{"kinds", {"se7"}}}}}) == ErrorCode::kConfig);
  CHECK(CodeOf(json{{"experiment", {{"modes", json::array()}}}}) == ErrorCode::kConfig);
  CHECK(CodeOf(json{{"perturb", {{"preset", "wild"}}}}) == ErrorCode::kConfig);
  CHECK(CodeOf(json{{"scene", {{"layout", "grid"}}}}) == ErrorCode::kConfig);
  CHECK(CodeOf(json{{"camera", {{"position", {0, 0}}}}}) == ErrorCode::kConfig);
  CHECK(CodeOf(json{{"camera", {{"look_at", {0, 0, -4}}}}}) == ErrorCode::kConfig);
  CHECK(CodeOf(json{{"camera", {{"kind", "focal_pose"}, {"position", {0, 0, 4}}, {"look_at", {0, 0, 10}}}}}) ==
        ErrorCode::kConfig);
}

TEST_CASE("missing config file") {
  CHECK_THROWS_AS(LoadConfigTree("/nonexistent/config.json", {}), Error);
}
