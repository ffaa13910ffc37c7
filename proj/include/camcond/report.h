#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "camcond/harness.h"
#include "json.hpp"

namespace camcond {

// Shortest round-trip decimal form; stable across runs.
std::string FormatDouble(double value);

inline constexpr const char* kResultsCsvHeader =
    "experiment_id,kind,flags,mode,seed,step,mse,rot_err_deg_mean,pos_err_mean,"
    "focal_err_px_mean,wall_ms";

// One row per trajectory point of every arm. wall_ms is written as 0 unless
// `timing` is set, so that repeated runs produce identical files.
void WriteResultsCsv(std::ostream& out, const std::vector<ArmResult>& arms, bool timing);

nlohmann::json ArmSummary(const ArmResult& arm);

// Signed heatmap: 32 px cells, blue-white-red ramp symmetric about zero,
// values printed in cells when the matrix is at most 16 x 16.
std::string HeatmapSvg(const Eigen::MatrixXd& matrix, const std::vector<std::string>& labels,
                       const std::string& title);

}  // namespace camcond
