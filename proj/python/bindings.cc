#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "camcond/config.h"
#include "camcond/derivatives.h"
#include "camcond/harness.h"
#include "camcond/preconditioner.h"
#include "camcond/report.h"
#include "camcond/sampler.h"

namespace py = pybind11;
using namespace camcond;

namespace {

using Points = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

std::vector<Vec3> ToPoints(const Points& pts) {
  std::vector<Vec3> out(pts.rows());
  for (Eigen::Index i = 0; i < pts.rows(); ++i) out[i] = pts.row(i).transpose();
  return out;
}

Points FromPoints(const std::vector<Vec3>& pts) {
  Points out(pts.size(), 3);
  for (size_t i = 0; i < pts.size(); ++i) out.row(i) = pts[i].transpose();
  return out;
}

Parameterization MakeParam(const std::string& kind, const PinholeCamera& cam) {
  return Parameterization(ParseParamKind(kind), cam);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Camera parameterizations and projection-covariance preconditioning";

  static py::exception<Error> error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<PinholeCamera>(m, "Camera")
      .def(py::init<>())
      .def_readwrite("fx", &PinholeCamera::fx)
      .def_readwrite("fy", &PinholeCamera::fy)
      .def_readwrite("u0", &PinholeCamera::u0)
      .def_readwrite("v0", &PinholeCamera::v0)
      .def_readwrite("k1", &PinholeCamera::k1)
      .def_readwrite("k2", &PinholeCamera::k2)
      .def_readwrite("width", &PinholeCamera::width)
      .def_readwrite("height", &PinholeCamera::height)
      .def_property(
          "rotation", [](const PinholeCamera& c) { return Mat3(c.pose.rotation); },
          [](PinholeCamera& c, const Mat3& r) { c.pose.rotation = r; })
      .def_property(
          "translation", [](const PinholeCamera& c) { return Vec3(c.pose.translation); },
          [](PinholeCamera& c, const Vec3& t) { c.pose.translation = t; })
      .def_property_readonly("center", &CameraCenter)
      .def("flatten", [](const PinholeCamera& c) { return Eigen::VectorXd(Flatten(c)); })
      .def_static(
          "look_at",
          [](double fx, double fy, double u0, double v0, int width, int height,
             const Vec3& position, const Vec3& target, const Vec3& up) {
            PinholeCamera c;
            c.fx = fx;
            c.fy = fy;
            c.u0 = u0;
            c.v0 = v0;
            c.width = width;
            c.height = height;
            c.pose = LookAt(position, target, up);
            ValidateCamera(c);
            return c;
          },
          py::arg("fx"), py::arg("fy"), py::arg("u0"), py::arg("v0"), py::arg("width"),
          py::arg("height"), py::arg("position"), py::arg("target") = Vec3::Zero().eval(),
          py::arg("up") = Vec3(0, -1, 0));

  m.def(
      "project",
      [](const PinholeCamera& cam, const Points& pts) {
        Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor> out(pts.rows(), 2);
        for (Eigen::Index i = 0; i < pts.rows(); ++i) {
          out.row(i) = Project(cam, Vec3(pts.row(i).transpose())).transpose();
        }
        return out;
      },
      py::arg("camera"), py::arg("points"));
  m.def("unproject", &Unproject, py::arg("camera"), py::arg("pixel"), py::arg("depth"));

  m.def("param_kinds", [] {
    std::vector<std::string> out;
    for (ParamFamily f : AllFamilies()) {
      for (bool pix : {false, true}) {
        for (bool log : {false, true}) out.push_back(ToString(ParamKind{f, pix, log}));
      }
    }
    return out;
  });
  m.def("param_dim", [](const std::string& kind) { return Dim(ParseParamKind(kind)); });
  m.def("param_layout", [](const std::string& kind) { return LayoutNames(ParseParamKind(kind)); });
  m.def(
      "apply_residual",
      [](const std::string& kind, const PinholeCamera& cam, const VectorXd& residual) {
        return MakeParam(kind, cam).Apply(residual);
      },
      py::arg("kind"), py::arg("camera"), py::arg("residual"));
  m.def(
      "projection_jacobian",
      [](const std::string& kind, const PinholeCamera& cam, const VectorXd& residual,
         const Points& pts) {
        return ProjectionJacobian(MakeParam(kind, cam), residual, ToPoints(pts));
      },
      py::arg("kind"), py::arg("camera"), py::arg("residual"), py::arg("points"));

  m.def(
      "sample_frustum",
      [](const PinholeCamera& cam, int count, double near, double far, std::uint64_t seed) {
        return FromPoints(SampleFrustum(cam, count, near, far, seed).points);
      },
      py::arg("camera"), py::arg("m") = kDefaultProxyPoints, py::arg("near") = kDefaultProxyNear,
      py::arg("far") = kDefaultProxyFar, py::arg("seed") = 0);
  m.def(
      "covariance",
      [](const std::string& kind, const PinholeCamera& cam, const Points& pts) {
        return ComputeCovariance(MakeParam(kind, cam), ToPoints(pts)).sigma;
      },
      py::arg("kind"), py::arg("camera"), py::arg("points"));
  m.def(
      "build_preconditioner",
      [](const MatrixXd& sigma, double lambda, double mu, const std::string& mode) {
        const Preconditioner p = BuildPreconditioner(sigma, lambda, mu, ParsePrecondMode(mode));
        return py::make_tuple(p.p_inv, p.clamp_count);
      },
      py::arg("sigma"), py::arg("lambda_") = kDefaultLambda, py::arg("mu") = kDefaultMu,
      py::arg("mode") = "full");
  m.def(
      "motion_magnitudes",
      [](const std::string& kind, const PinholeCamera& cam, const Points& pts,
         const std::optional<MatrixXd>& p_inv) {
        const Parameterization param = MakeParam(kind, cam);
        const std::vector<Vec3> points = ToPoints(pts);
        if (p_inv) return MotionMagnitudes(PreconditionedParameterization(param, *p_inv), points);
        return MotionMagnitudes(param, points);
      },
      py::arg("kind"), py::arg("camera"), py::arg("points"), py::arg("p_inv") = py::none());

  m.def("default_config_json", [] { return DefaultConfigJson().dump(); });
  m.def(
      "run_grid_json",
      [](const std::string& config_json, int jobs) {
        const RunConfig cfg = ParseRunConfig(nlohmann::json::parse(config_json));
        std::vector<ArmResult> arms;
        {
          py::gil_scoped_release release;
          arms = RunGrid(cfg.experiment, jobs);
        }
        nlohmann::json out = nlohmann::json::array();
        for (const ArmResult& a : arms) out.push_back(ArmSummary(a));
        return out.dump();
      },
      py::arg("config_json"), py::arg("jobs") = 1);
}
