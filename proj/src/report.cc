#include "camcond/report.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace camcond {

std::string FormatDouble(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void WriteResultsCsv(std::ostream& out, const std::vector<ArmResult>& arms, bool timing) {
  out << kResultsCsvHeader << '\n';
  for (const ArmResult& arm : arms) {
    const std::string wall = timing ? FormatDouble(std::round(arm.result.wall_ms)) : "0";
    for (const TrajectoryPoint& p : arm.result.trajectory) {
      out << arm.id << ',' << FamilyName(arm.kind.family) << ',' << FlagsString(arm.kind) << ','
          << ToString(arm.mode) << ',' << arm.seed << ',' << p.step << ',' << FormatDouble(p.mse)
          << ',' << FormatDouble(p.metrics.rotation_err_deg) << ','
          << FormatDouble(p.metrics.position_err) << ',' << FormatDouble(p.metrics.focal_err_px)
          << ',' << wall << '\n';
    }
  }
}

namespace {

nlohmann::json MetricsJson(const CameraMetrics& m) {
  return {{"rot_err_deg", m.rotation_err_deg},
          {"pos_err", m.position_err},
          {"focal_err_px", m.focal_err_px}};
}

}  // namespace

nlohmann::json ArmSummary(const ArmResult& arm) {
  nlohmann::json j;
  j["experiment_id"] = arm.id;
  j["kind"] = ToString(arm.kind);
  j["mode"] = ToString(arm.mode);
  j["seed"] = arm.seed;
  j["initial"] = MetricsJson(arm.initial_metrics);
  const TrajectoryPoint& last = arm.result.final_point();
  j["final"] = MetricsJson(last.metrics);
  j["final"]["mse"] = std::isfinite(last.mse) ? nlohmann::json(last.mse) : nlohmann::json();
  j["final"]["step"] = last.step;
  j["initial_mse"] = arm.result.trajectory.front().mse;
  j["clamp_count"] = arm.result.clamp_count;
  j["failed"] = arm.result.failed;
  if (arm.result.failed) {
    j["fail_step"] = arm.result.fail_step;
    j["error"] = arm.result.error;
  }
  return j;
}

namespace {

std::string RampColor(double t) {
  // t in [-1, 1]: blue (negative) through white to red (positive).
  t = std::clamp(t, -1.0, 1.0);
  int r, g, b;
  if (t >= 0) {
    r = 255;
    g = static_cast<int>(std::lround(255 * (1.0 - t)));
    b = g;
  } else {
    b = 255;
    r = static_cast<int>(std::lround(255 * (1.0 + t)));
    g = r;
  }
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string HeatmapSvg(const Eigen::MatrixXd& matrix, const std::vector<std::string>& labels,
                       const std::string& title) {
  constexpr int kCell = 32;
  constexpr int kMargin = 64;
  const int rows = static_cast<int>(matrix.rows());
  const int cols = static_cast<int>(matrix.cols());
  const int width = kMargin + cols * kCell + 8;
  const int height = kMargin + rows * kCell + 8;
  const double scale = std::max(matrix.cwiseAbs().maxCoeff(), 1e-300);
  const bool annotate = rows <= 16 && cols <= 16;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"monospace\">\n";
  svg << "<text x=\"4\" y=\"14\" font-size=\"12\">" << Escape(title) << "</text>\n";
  for (int c = 0; c < cols && c < static_cast<int>(labels.size()); ++c) {
    const int x = kMargin + c * kCell + kCell / 2;
    svg << "<text x=\"" << x << "\" y=\"" << kMargin - 6 << "\" font-size=\"9\" "
        << "text-anchor=\"start\" transform=\"rotate(-60 " << x << ' ' << kMargin - 6 << ")\">"
        << Escape(labels[static_cast<size_t>(c)]) << "</text>\n";
  }
  for (int r = 0; r < rows; ++r) {
    const int y = kMargin + r * kCell;
    if (r < static_cast<int>(labels.size())) {
      svg << "<text x=\"" << kMargin - 4 << "\" y=\"" << y + kCell / 2 + 3
          << "\" font-size=\"9\" text-anchor=\"end\">" << Escape(labels[static_cast<size_t>(r)])
          << "</text>\n";
    }
    for (int c = 0; c < cols; ++c) {
      const int x = kMargin + c * kCell;
      const double v = matrix(r, c);
      svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell << "\" height=\""
          << kCell << "\" fill=\"" << RampColor(v / scale) << "\" stroke=\"#cccccc\"/>\n";
      if (annotate) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2g", v);
        svg << "<text x=\"" << x + kCell / 2 << "\" y=\"" << y + kCell / 2 + 3
            << "\" font-size=\"7\" text-anchor=\"middle\">" << buf << "</text>\n";
      }
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace camcond
