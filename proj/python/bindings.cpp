#include <sstream>
#include <string>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "diffdrive/cli.hpp"
#include "diffdrive/errors.hpp"
#include "diffdrive/hardware.hpp"
#include "diffdrive/kinematics.hpp"
#include "diffdrive/regulator.hpp"
#include "diffdrive/roots.hpp"
#include "diffdrive/scenario.hpp"
#include "diffdrive/sim.hpp"
#include "diffdrive/tracking.hpp"

namespace py = pybind11;
using namespace diffdrive;

namespace {

HeadingConvention convention_from(const std::string& name) {
  if (name == "y_axis") {
    return HeadingConvention::kYAxis;
  }
  if (name == "x_axis") {
    return HeadingConvention::kXAxis;
  }
  throw InvalidArgument("convention must be \"y_axis\" or \"x_axis\"");
}

std::string trace_csv(const SimTrace& trace) {
  std::ostringstream out;
  write_trace_csv(trace, out);
  return out.str();
}

py::tuple run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"diffdrive"};
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  std::ostringstream out;
  std::ostringstream err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Differential-drive kinematics, controllers and closed-loop simulation";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<ReferenceTooSlow>(m, "ReferenceTooSlow", error.ptr());
  py::register_exception<PolarSingularity>(m, "PolarSingularity", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());

  py::class_<Pose>(m, "Pose")
      .def(py::init<>())
      .def(py::init<double, double, double>(), py::arg("x"), py::arg("y"), py::arg("theta"))
      .def_readonly("x", &Pose::x)
      .def_readonly("y", &Pose::y)
      .def_readonly("theta", &Pose::theta)
      .def("__repr__", [](const Pose& p) {
        return "Pose(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ", " +
               std::to_string(p.theta) + ")";
      });

  py::class_<BodyTwist>(m, "BodyTwist")
      .def(py::init<double, double>(), py::arg("v") = 0.0, py::arg("omega") = 0.0)
      .def_readwrite("v", &BodyTwist::v)
      .def_readwrite("omega", &BodyTwist::omega);

  py::class_<WheelSpeeds>(m, "WheelSpeeds")
      .def(py::init<double, double>(), py::arg("omega_l") = 0.0, py::arg("omega_r") = 0.0)
      .def_readwrite("omega_l", &WheelSpeeds::omega_l)
      .def_readwrite("omega_r", &WheelSpeeds::omega_r);

  py::class_<RobotGeometry>(m, "RobotGeometry")
      .def(py::init<>())
      .def(py::init<double, double>(), py::arg("wheel_radius"), py::arg("axle_length"))
      .def_readwrite("wheel_radius", &RobotGeometry::wheel_radius)
      .def_readwrite("axle_length", &RobotGeometry::axle_length);

  m.def("wrap_angle", &wrap_angle, py::arg("theta"));
  m.def("atan2_custom", &atan2_custom, py::arg("y"), py::arg("x"));
  m.def(
      "to_y_axis_heading",
      [](const Pose& p, const std::string& c) { return to_y_axis_heading(p, convention_from(c)); },
      py::arg("pose"), py::arg("convention"));
  m.def(
      "from_y_axis_heading",
      [](const Pose& p, const std::string& c) { return from_y_axis_heading(p, convention_from(c)); },
      py::arg("pose"), py::arg("convention"));
  m.def(
      "pose_derivative",
      [](const Pose& p, const BodyTwist& t) {
        const PoseRate r = pose_derivative(p, t);
        return py::make_tuple(r.x_dot, r.y_dot, r.theta_dot);
      },
      py::arg("pose"), py::arg("twist"));
  m.def("wheels_to_twist", &wheels_to_twist, py::arg("wheels"),
        py::arg("geometry") = RobotGeometry{});
  m.def("twist_to_wheels", &twist_to_wheels, py::arg("twist"),
        py::arg("geometry") = RobotGeometry{});
  m.def("integrate_pose", &integrate_pose, py::arg("pose"), py::arg("twist"), py::arg("dt"),
        py::arg("substeps") = 1);

  m.def(
      "tracking_error",
      [](const Pose& pose, const Pose& ref) {
        const TrackingError e = tracking_error(pose, {ref, 0.0, 0.0});
        return py::make_tuple(e.e1, e.e2, e.e3);
      },
      py::arg("pose"), py::arg("reference"));
  m.def(
      "design_gains",
      [](double xi, double omega_n, double v_ref, double omega_ref, double epsilon_v) {
        const GainDesign d = design_gains({xi, omega_n}, v_ref, omega_ref, epsilon_v);
        return py::make_tuple(d.gains.k1, d.gains.k2, d.gains.k3);
      },
      py::arg("xi"), py::arg("omega_n"), py::arg("v_ref"), py::arg("omega_ref") = 0.0,
      py::arg("epsilon_v") = kDefaultEpsilonV);
  m.def(
      "tracking_closed_loop_matrix",
      [](double k1, double k2, double k3, double v_ref, double omega_ref) {
        return tracking_closed_loop_matrix({k1, k2, k3}, v_ref, omega_ref);
      },
      py::arg("k1"), py::arg("k2"), py::arg("k3"), py::arg("v_ref"), py::arg("omega_ref"));
  m.def(
      "characteristic_roots",
      [](const Matrix3& matrix) {
        const Roots3 r = characteristic_roots(matrix);
        return std::vector<std::complex<double>>(r.begin(), r.end());
      },
      py::arg("matrix"));

  m.def(
      "polar_transform",
      [](const Pose& pose, const Pose& goal, const std::string& convention, double r_stop) {
        const PolarState s = polar_transform(pose, {goal}, {convention_from(convention), r_stop});
        return py::make_tuple(s.r, s.e_theta, s.theta_E);
      },
      py::arg("pose"), py::arg("goal"), py::arg("convention") = "y_axis",
      py::arg("r_stop") = 0.0);
  m.def(
      "stability_check",
      [](double k_r, double k_etheta, double k_thetaE) {
        const StabilityVerdict v = stability_check({k_r, k_etheta, k_thetaE});
        std::vector<std::string> violated;
        for (StabilityCondition c : v.violated) {
          violated.push_back(to_string(c));
        }
        return py::make_tuple(v.stable, violated);
      },
      py::arg("k_r"), py::arg("k_etheta"), py::arg("k_thetaE"));
  m.def(
      "regulator_linearized_matrix",
      [](double k_r, double k_etheta, double k_thetaE) {
        return regulator_linearized_matrix({k_r, k_etheta, k_thetaE});
      },
      py::arg("k_r"), py::arg("k_etheta"), py::arg("k_thetaE"));
  m.def("ramp_factor", &ramp_factor, py::arg("alpha"), py::arg("s"));
  m.def(
      "wheel_speed_to_power",
      [](double omega) {
        const PowerCommand p = wheel_speed_to_power(omega, MotorCalibration{});
        return py::make_tuple(p.value, p.saturated);
      },
      py::arg("omega"));

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def_property_readonly("mode",
                             [](const ScenarioConfig& c) {
                               return c.mode == ScenarioMode::kRegulation ? "regulation"
                                                                           : "tracking";
                             })
      .def_readonly("initial_pose", &ScenarioConfig::initial_pose)
      .def_readonly("control_period", &ScenarioConfig::control_period)
      .def_readonly("max_time", &ScenarioConfig::max_time);

  py::class_<SimTrace>(m, "SimTrace")
      .def("__len__", [](const SimTrace& t) { return t.records.size(); })
      .def("to_csv", &trace_csv)
      .def("summary_json", [](const SimTrace& t) { return summary_to_json(t).dump(); })
      .def_property_readonly("converged", [](const SimTrace& t) { return t.summary.converged; })
      .def_property_readonly("diverged", [](const SimTrace& t) { return t.summary.diverged; });

  m.def("load_scenario", &load_scenario, py::arg("path"),
        py::arg("overrides") = std::vector<std::string>{});
  m.def(
      "parse_scenario",
      [](const std::string& text, const std::vector<std::string>& overrides) {
        nlohmann::json doc;
        try {
          doc = nlohmann::json::parse(text, nullptr, true, true);
        } catch (const nlohmann::json::parse_error& e) {
          throw ConfigError("", std::string("parse error: ") + e.what());
        }
        return parse_scenario(std::move(doc), overrides);
      },
      py::arg("text"), py::arg("overrides") = std::vector<std::string>{});
  m.def("run_scenario", &run_scenario, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("trace_csv_columns", &trace_csv_columns);
  m.def("run_cli", &run_cli, py::arg("args"),
        "Runs the command line front end; returns (exit_code, stdout, stderr).");
}
