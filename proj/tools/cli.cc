#include "cli.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "camcond/config.h"
#include "camcond/report.h"

namespace camcond {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  std::int64_t seed = -1;
  int jobs = 0;
  bool strict = false;
  bool timing = false;
  bool whiten = false;
  std::vector<std::pair<std::string, std::string>> overrides;
};

// Output files are staged in memory and written only after the command
// succeeded, so a failing run leaves the output directory untouched.
class Staged {
 public:
  explicit Staged(fs::path root) : root_(std::move(root)) {}
  void Add(const fs::path& relative, std::string contents) {
    files_.emplace_back(relative, std::move(contents));
  }
  void Commit() const {
    for (const auto& [rel, contents] : files_) {
      const fs::path path = root_ / rel;
      fs::create_directories(path.parent_path());
      std::ofstream f(path, std::ios::binary);
      f << contents;
      if (!f) Fail(ErrorCode::kConfig, "cannot write '" + path.string() + "'");
    }
  }

 private:
  fs::path root_;
  std::vector<std::pair<fs::path, std::string>> files_;
};

std::string JsonText(const json& j) { return j.dump(2) + "\n"; }

double MaxIdentityDeviation(const MatrixXd& m) {
  return (m - MatrixXd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

struct WhiteningCheck {
  double max_dev = 0.0;
  int clamp_count = 0;
};

// max |J~^T J~ - I| for the wrapped map at a zero latent.
WhiteningCheck CheckWhitening(const Parameterization& param, const std::vector<Vec3>& points,
                              const Preconditioner& precond) {
  const PreconditionedParameterization wrapped = Wrap(param, precond);
  const MatrixXd gram =
      ProjectionCovariance(wrapped, VectorXd::Zero(wrapped.dim()), points);
  return {MaxIdentityDeviation(gram), precond.clamp_count};
}

int CmdPrecondition(const Options& opt, const RunConfig& rc, std::ostream& out) {
  const ExperimentConfig& ex = rc.experiment;
  const Parameterization param(rc.camera.kind, rc.camera.camera);
  const ProxyPointSet proxy =
      SampleFrustum(rc.camera.camera, ex.proxy.m, ex.proxy.near, ex.proxy.far, ex.proxy.seed);
  const Covariance cov = ComputeCovariance(param, proxy.points);
  const Preconditioner precond =
      BuildPreconditioner(cov, ex.precond.lambda, ex.precond.mu, PrecondMode::kFull);
  const json j = ToJson(cov, precond);
  const std::vector<std::string> labels = LayoutNames(rc.camera.kind);
  const std::string kind = ToString(rc.camera.kind);

  Staged files(opt.out_dir);
  files.Add("sigma.json", JsonText(j));
  files.Add("p_inv.json", JsonText(j));
  files.Add("covariance.svg", HeatmapSvg(cov.sigma, labels, "Sigma (" + kind + ")"));
  files.Add("p_inv.svg", HeatmapSvg(precond.p_inv, labels, "P_inv (" + kind + ")"));

  out << "kind " << kind << " k=" << param.dim() << " m=" << cov.m
      << " lambda=" << FormatDouble(precond.lambda) << " mu=" << FormatDouble(precond.mu)
      << " clamps=" << precond.clamp_count << "\n";

  int status = kExitOk;
  if (ex.precond.lambda == 0.0 && ex.precond.mu == 0.0) {
    const WhiteningCheck check = CheckWhitening(param, proxy.points, precond);
    out << "whitening max|J~^T J~ - I| = " << std::scientific << std::setprecision(3)
        << check.max_dev << std::defaultfloat << " (clamps " << check.clamp_count << ")\n";
    if (opt.strict && !(check.max_dev <= 1e-4)) {
      out << "whitening check FAILED (tolerance 1e-4)\n";
      status = kExitNumeric;
    }
  }
  files.Commit();
  return status;
}

int CmdTrails(const Options& opt, const RunConfig& rc, std::ostream& out) {
  const ExperimentConfig& ex = rc.experiment;
  const PinholeCamera& cam = rc.camera.camera;
  const ProxyPointSet proxy = SampleFrustum(cam, ex.proxy.m, ex.proxy.near, ex.proxy.far,
                                            ex.proxy.seed);
  std::ostringstream csv;
  csv << "kind,axis,index,raw_px,preconditioned_px\n";
  for (const ParamKind kind : ex.kinds) {
    const Parameterization param(kind, cam);
    const Covariance cov = ComputeCovariance(param, proxy.points);
    const Preconditioner precond =
        BuildPreconditioner(cov, ex.precond.lambda, ex.precond.mu, PrecondMode::kFull);
    const VectorXd raw = MotionMagnitudes(param, proxy.points);
    const VectorXd pre = MotionMagnitudes(Wrap(param, precond), proxy.points);
    const std::vector<std::string> labels = LayoutNames(kind);
    for (int r = 0; r < param.dim(); ++r) {
      csv << ToString(kind) << ',' << labels[static_cast<size_t>(r)] << ',' << r << ','
          << FormatDouble(raw(r)) << ',' << FormatDouble(pre(r)) << '\n';
    }
    const double spread_raw = raw.maxCoeff() / raw.minCoeff();
    const double spread_pre = pre.maxCoeff() / pre.minCoeff();
    out << std::left << std::setw(28) << ToString(kind) << " raw max/min " << std::setw(12)
        << FormatDouble(spread_raw) << " preconditioned max/min " << FormatDouble(spread_pre)
        << "\n";
  }
  Staged files(opt.out_dir);
  files.Add("motion_magnitudes.csv", csv.str());
  files.Commit();
  return kExitOk;
}

int CmdRefine(const Options& opt, const RunConfig& rc, std::ostream& out) {
  const int jobs = opt.jobs > 0 ? opt.jobs
                                : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  const std::vector<ArmResult> arms = RunGrid(rc.experiment, jobs);

  Staged files(opt.out_dir);
  std::ostringstream csv;
  WriteResultsCsv(csv, arms, opt.timing);
  files.Add("results.csv", csv.str());
  bool any_failed = false;
  for (const ArmResult& arm : arms) {
    json summary = ArmSummary(arm);
    if (opt.timing) summary["wall_ms"] = arm.result.wall_ms;
    files.Add(fs::path(arm.id) / "summary.json", JsonText(summary));
    any_failed = any_failed || arm.result.failed;
  }

  // Rank (kind, mode) cells by mean final rotation error over seeds.
  struct Cell {
    std::string kind, mode;
    int count = 0, failed = 0;
    double rot = 0, pos = 0, focal = 0, mse = 0;
  };
  std::map<std::pair<std::string, std::string>, Cell> cells;
  for (const ArmResult& arm : arms) {
    Cell& c = cells[{ToString(arm.kind), ToString(arm.mode)}];
    c.kind = ToString(arm.kind);
    c.mode = ToString(arm.mode);
    const TrajectoryPoint& last = arm.result.final_point();
    ++c.count;
    c.failed += arm.result.failed ? 1 : 0;
    c.rot += last.metrics.rotation_err_deg;
    c.pos += last.metrics.position_err;
    c.focal += last.metrics.focal_err_px;
    c.mse += last.mse;
  }
  std::vector<Cell> ranked;
  for (auto& [key, c] : cells) {
    c.rot /= c.count;
    c.pos /= c.count;
    c.focal /= c.count;
    c.mse /= c.count;
    ranked.push_back(c);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const Cell& a, const Cell& b) {
    const double ra = std::isfinite(a.rot) ? a.rot : INFINITY;
    const double rb = std::isfinite(b.rot) ? b.rot : INFINITY;
    return ra < rb;
  });
  out << std::left << std::setw(5) << "rank" << std::setw(28) << "kind" << std::setw(6) << "mode"
      << std::right << std::setw(14) << "rot_err_deg" << std::setw(14) << "pos_err"
      << std::setw(14) << "focal_err_px" << std::setw(14) << "mse" << std::setw(8) << "failed"
      << "\n";
  out << std::scientific << std::setprecision(3);
  int rank = 1;
  for (const Cell& c : ranked) {
    out << std::left << std::setw(5) << rank++ << std::setw(28) << c.kind << std::setw(6) << c.mode
        << std::right << std::setw(14) << c.rot << std::setw(14) << c.pos << std::setw(14)
        << c.focal << std::setw(14) << c.mse << std::setw(8) << c.failed << "\n";
  }
  out << std::defaultfloat;
  if (any_failed) out << "some arms diverged; see failed column and summary.json\n";
  files.Commit();
  return kExitOk;
}

struct CheckLine {
  std::ostream& out;
  bool all = true;
  void operator()(const std::string& name, bool ok, double value) {
    all = all && ok;
    out << (ok ? "[PASS] " : "[FAIL] ") << name << " " << std::scientific << std::setprecision(3)
        << value << std::defaultfloat << "\n";
  }
};

PinholeCamera RandomCamera(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PinholeCamera cam;
  cam.width = 640;
  cam.height = 480;
  cam.fx = 600.0 + 400.0 * (u(rng) + 1.0) / 2.0;
  cam.fy = cam.fx * (1.0 + 0.05 * u(rng));
  cam.u0 = 320.0 + 10.0 * u(rng);
  cam.v0 = 240.0 + 10.0 * u(rng);
  cam.k1 = 0.05 * u(rng);
  cam.k2 = 0.01 * u(rng);
  const Vec3 position = Vec3(u(rng), u(rng), -4.0 + u(rng));
  const Vec3 target = 0.3 * Vec3(u(rng), u(rng), u(rng));
  cam.pose = LookAt(position, target, -Vec3::UnitY());
  return cam;
}

int CmdSelfcheck(std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  CheckLine check{out};
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  double so3 = 0.0, se3 = 0.0, rot6d = 0.0, unproject = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Vec3 omega = Vec3(u(rng), u(rng), u(rng)).normalized() * (3.0 * (u(rng) + 1.0) / 2.0);
    so3 = std::max(so3, (LogSO3(ExpSO3<double>(omega)) - omega).cwiseAbs().maxCoeff());
    const ScrewAxis s{omega, Vec3(u(rng), u(rng), u(rng))};
    const ScrewAxis back = LogSE3(ExpSE3(s));
    se3 = std::max(se3, (back.stacked() - s.stacked()).cwiseAbs().maxCoeff());
    const Mat3 r = ExpSO3<double>(omega);
    rot6d = std::max(rot6d, (Rot6dToRotation<double>(RotationToRot6d(r)) - r).cwiseAbs().maxCoeff());
    const PinholeCamera cam = RandomCamera(rng);
    const Pixel p(cam.width * (u(rng) + 1.0) / 2.0, cam.height * (u(rng) + 1.0) / 2.0);
    unproject = std::max(unproject, (Project(cam, Unproject(cam, p, 3.0)) - p).norm());
  }
  check("log_so3(exp_so3(w)) round trip", so3 <= 1e-9, so3);
  check("log_se3(exp_se3(s)) round trip", se3 <= 1e-9, se3);
  check("rot6d round trip", rot6d <= 1e-12, rot6d);
  check("project(unproject(p)) round trip", unproject <= 1e-6, unproject);

  {
    const PinholeCamera cam = RandomCamera(rng);
    const ParamKind kind{ParamFamily::kFocalPoseIntrinsics};
    const Parameterization param(kind, cam);
    const ProxyPointSet proxy = SampleFrustum(cam, kDefaultProxyPoints, 0.2, 100.0, 7);
    const Preconditioner precond =
        BuildPreconditioner(ComputeCovariance(param, proxy.points), 0.0, 0.0);
    const WhiteningCheck w = CheckWhitening(param, proxy.points, precond);
    check("whitening identity (" + ToString(kind) + ")", w.max_dev <= 1e-4, w.max_dev);
  }

  double fd = 0.0;
  for (const ParamFamily family : AllFamilies()) {
    const PinholeCamera cam = RandomCamera(rng);
    const Parameterization param(ParamKind{family}, cam);
    const ProxyPointSet proxy = SampleFrustum(cam, 50, 1.0, 10.0, 11);
    VectorXd residual(param.dim());
    for (int r = 0; r < param.dim(); ++r) residual(r) = 1e-3 * u(rng);
    const MatrixXd analytic = ProjectionJacobian(param, residual, proxy.points);
    const MatrixXd numeric = ProjectionJacobianFD(param, residual, proxy.points);
    const double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
    fd = std::max(fd, (analytic - numeric).cwiseAbs().maxCoeff() / scale);
  }
  check("FD Jacobian agreement (all families)", fd <= 1e-6, fd);

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  check("selfcheck runtime < 30 s", seconds < 30.0, seconds);
  return check.all ? kExitOk : kExitNumeric;
}

// Pulls `--section.key=value` and `--section.key value` overrides out of the
// argument list, leaving the rest for the option parser.
std::vector<std::string> ExtractOverrides(const std::vector<std::string>& args,
                                          Options* opt) {
  std::vector<std::string> rest;
  for (size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (i > 0 && a.rfind("--", 0) == 0) {
      const std::string body = a.substr(2);
      const size_t eq = body.find('=');
      const std::string key = body.substr(0, eq);
      if (key.find('.') != std::string::npos) {
        if (eq != std::string::npos) {
          opt->overrides.emplace_back(key, body.substr(eq + 1));
        } else if (i + 1 < args.size()) {
          opt->overrides.emplace_back(key, args[++i]);
        } else {
          Fail(ErrorCode::kConfig, "missing value for --" + key);
        }
        continue;
      }
    }
    rest.push_back(a);
  }
  return rest;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  try {
    std::vector<std::string> rest = ExtractOverrides(args, &opt);

    CLI::App app{"Camera preconditioning toolkit"};
    app.require_subcommand(1, 1);
    app.add_option("--config", opt.config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--out-dir", opt.out_dir, "Directory for output files");
    app.add_option("--seed", opt.seed, "Seed override");
    app.add_option("--jobs", opt.jobs, "Worker threads for refine (default: logical cores)");
    app.add_flag("--strict", opt.strict, "Fail when numeric self-checks exceed tolerance");
    app.add_flag("--timing", opt.timing, "Record wall-clock times in results");
    auto* pre = app.add_subcommand("precondition", "Write Sigma / P_inv JSON and heatmaps");
    pre->add_flag("--whiten", opt.whiten, "Set lambda = mu = 0 and print the whitening check");
    app.add_subcommand("trails", "Write raw and preconditioned motion magnitudes");
    app.add_subcommand("refine", "Run the experiment grid");
    app.add_subcommand("selfcheck", "Run the fast invariant suite");
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    std::vector<std::string> reversed(rest.rbegin(), rest.rend() - 1);
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
      app.exit(e, out, err);
      return kExitConfig;
    }
    opt.command = app.get_subcommands().front()->get_name();
    if (opt.command == "selfcheck") return CmdSelfcheck(out);

    if (opt.whiten) {
      opt.overrides.emplace_back("precond.lambda", "0");
      opt.overrides.emplace_back("precond.mu", "0");
    }
    if (opt.seed >= 0) {
      const std::string s = std::to_string(opt.seed);
      if (opt.command == "refine") {
        opt.overrides.emplace_back("experiment.seeds", "[" + s + "]");
      } else {
        opt.overrides.emplace_back("proxy.seed", s);
      }
    }
    const json tree = LoadConfigTree(opt.config_path, opt.overrides);
    const RunConfig rc = ParseRunConfig(tree);

    if (opt.command == "precondition") return CmdPrecondition(opt, rc, out);
    if (opt.command == "trails") return CmdTrails(opt, rc, out);
    return CmdRefine(opt, rc, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.is_config_error() ? kExitConfig : kExitNumeric;
  } catch (const json::exception& e) {
    err << "error [config]: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    err << "error [io]: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace camcond
