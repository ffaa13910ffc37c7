#pragma once

#include <string>
#include <vector>

#include "camcond/harness.h"
#include "json.hpp"

namespace camcond {

// Camera used by the `precondition` and `trails` commands.
struct CameraSpec {
  ParamKind kind{ParamFamily::kSE3Focal};
  PinholeCamera camera;
};

struct RunConfig {
  ExperimentConfig experiment;
  CameraSpec camera;
};

// Complete default configuration tree. Every accepted key appears here.
nlohmann::json DefaultConfigJson();

// Applies `--a.b.c=value` style overrides. Values parse as JSON when
// possible and fall back to plain strings.
void ApplyOverride(nlohmann::json& tree, const std::string& dotted_key, const std::string& value);

// Rejects keys absent from the default tree, merges over defaults and
// validates every value. Throws Error(kConfig) on any problem.
RunConfig ParseRunConfig(const nlohmann::json& user);

// Parses the JSON file at `path` (empty path = defaults only) and overrides.
nlohmann::json LoadConfigTree(const std::string& path,
                              const std::vector<std::pair<std::string, std::string>>& overrides);

}  // namespace camcond
