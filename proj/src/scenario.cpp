#include "diffdrive/scenario.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "diffdrive/errors.hpp"

namespace diffdrive {

using nlohmann::json;

namespace {

std::string join(const std::string& parent, std::string_view key) {
  return parent.empty() ? std::string(key) : parent + "." + std::string(key);
}

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& object, std::string path)
      : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) {
      throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }
  }

  bool has(std::string_view key) const { return object_.contains(key); }

  std::optional<double> number(std::string_view key) {
    const json* value = take(key);
    if (value == nullptr) {
      return std::nullopt;
    }
    if (!value->is_number()) {
      throw ConfigError(join(path_, key), "expected a number");
    }
    const double result = value->get<double>();
    if (!std::isfinite(result)) {
      throw ConfigError(join(path_, key), "must be finite");
    }
    return result;
  }

  double number_or(std::string_view key, double fallback) {
    return number(key).value_or(fallback);
  }

  double positive_or(std::string_view key, double fallback) {
    const double result = number_or(key, fallback);
    if (!(result > 0.0)) {
      throw ConfigError(join(path_, key), "must be positive");
    }
    return result;
  }

  bool boolean_or(std::string_view key, bool fallback) {
    const json* value = take(key);
    if (value == nullptr) {
      return fallback;
    }
    if (!value->is_boolean()) {
      throw ConfigError(join(path_, key), "expected true or false");
    }
    return value->get<bool>();
  }

  std::optional<std::string> string(std::string_view key) {
    const json* value = take(key);
    if (value == nullptr) {
      return std::nullopt;
    }
    if (!value->is_string()) {
      throw ConfigError(join(path_, key), "expected a string");
    }
    return value->get<std::string>();
  }

  std::optional<ObjectReader> object(std::string_view key) {
    const json* value = take(key);
    if (value == nullptr) {
      return std::nullopt;
    }
    return ObjectReader(*value, join(path_, key));
  }

  const json* array(std::string_view key) {
    const json* value = take(key);
    if (value != nullptr && !value->is_array()) {
      throw ConfigError(join(path_, key), "expected an array");
    }
    return value;
  }

  std::string path(std::string_view key) const { return join(path_, key); }

  /// Throws for the first key that was never read.
  void finish() const {
    for (const auto& item : object_.items()) {
      if (consumed_.count(item.key()) == 0) {
        throw ConfigError(join(path_, item.key()), "unknown key");
      }
    }
  }

 private:
  const json* take(std::string_view key) {
    const auto it = object_.find(key);
    if (it == object_.end()) {
      return nullptr;
    }
    consumed_.emplace(key);
    return &*it;
  }

  const json& object_;
  std::string path_;
  std::set<std::string, std::less<>> consumed_;
};

// Reads {x, y, theta} written in `convention` and returns a native pose.
Pose read_pose(ObjectReader reader, HeadingConvention convention) {
  const Pose pose(reader.number_or("x", 0.0), reader.number_or("y", 0.0),
                  reader.number_or("theta", 0.0));
  reader.finish();
  return to_y_axis_heading(pose, convention);
}

RobotGeometry read_geometry(ObjectReader reader) {
  RobotGeometry geom;
  geom.wheel_radius = reader.positive_or("wheel_radius", geom.wheel_radius);
  geom.axle_length = reader.positive_or("axle_length", geom.axle_length);
  reader.finish();
  return geom;
}

MotorCalibration read_calibration(ObjectReader reader) {
  MotorCalibration calib;
  calib.rad_to_deg = reader.positive_or("rad_to_deg", calib.rad_to_deg);
  calib.power_per_degps = reader.positive_or("power_per_degps", calib.power_per_degps);
  calib.power_offset = reader.number_or("power_offset", calib.power_offset);
  if (!(calib.power_offset >= 0.0 && calib.power_offset < kMaxPower)) {
    throw ConfigError(reader.path("power_offset"), "must lie in [0, 100)");
  }
  reader.finish();
  return calib;
}

RegulationSettings read_regulator(std::optional<ObjectReader> reader,
                                  RegulationSettings settings) {
  if (!reader) {
    return settings;
  }
  if (auto gains = reader->object("gains")) {
    settings.gains.k_r = gains->number_or("k_r", settings.gains.k_r);
    settings.gains.k_etheta = gains->number_or("k_etheta", settings.gains.k_etheta);
    settings.gains.k_thetaE = gains->number_or("k_thetaE", settings.gains.k_thetaE);
    gains->finish();
  }
  if (auto ramp = reader->object("ramp")) {
    RampConfig& cfg = settings.ramp;
    cfg.alpha_r = ramp->positive_or("alpha_r", cfg.alpha_r);
    cfg.alpha_etheta = ramp->positive_or("alpha_etheta", cfg.alpha_etheta);
    cfg.alpha_thetaE = ramp->positive_or("alpha_thetaE", cfg.alpha_thetaE);
    if (const auto mode = ramp->string("mode")) {
      if (*mode == "time") {
        cfg.mode = RampMode::kTime;
      } else if (*mode == "distance") {
        cfg.mode = RampMode::kDistance;
      } else {
        throw ConfigError(ramp->path("mode"), "expected \"time\" or \"distance\"");
      }
    }
    ramp->finish();
  }
  settings.r_stop = reader->number_or("r_stop", settings.r_stop);
  if (!(settings.r_stop >= 0.0)) {
    throw ConfigError(reader->path("r_stop"), "must be non-negative");
  }
  settings.theta_stop = reader->positive_or("theta_stop", settings.theta_stop);
  reader->finish();
  return settings;
}

ReferenceProfile read_profile(ObjectReader reader, HeadingConvention convention) {
  Pose start = to_y_axis_heading(Pose{}, convention);
  if (auto pose = reader.object("initial_pose")) {
    start = read_pose(*pose, convention);
  }
  const json* segments = reader.array("segments");
  auto preset = reader.object("preset");
  if ((segments != nullptr) == preset.has_value()) {
    throw ConfigError(reader.path("segments"),
                      "give exactly one of \"segments\" or \"preset\"");
  }

  ReferenceProfile profile;
  if (preset) {
    const auto name = preset->string("name");
    if (!name) {
      throw ConfigError(preset->path("name"), "required");
    }
    const double v = preset->number_or("v", 0.2);
    const double omega = preset->number_or("omega", 0.5);
    const double duration = preset->positive_or("duration", 20.0);
    preset->finish();
    try {
      profile = make_named_profile(*name, start, v, omega, duration);
    } catch (const InvalidArgument& e) {
      throw ConfigError(preset->path("name"), e.what());
    }
  } else {
    profile.initial_pose = start;
    if (segments->empty()) {
      throw ConfigError(reader.path("segments"), "needs at least one segment");
    }
    for (std::size_t i = 0; i < segments->size(); ++i) {
      ObjectReader seg((*segments)[i], reader.path("segments") + fmt::format("[{}]", i));
      ReferenceSegment segment;
      segment.v_ref = seg.number_or("v", 0.0);
      segment.omega_ref = seg.number_or("omega", 0.0);
      const auto duration = seg.number("duration");
      if (!duration) {
        throw ConfigError(seg.path("duration"), "required");
      }
      if (!(*duration > 0.0)) {
        throw ConfigError(seg.path("duration"), "must be positive");
      }
      segment.duration = *duration;
      seg.finish();
      profile.segments.push_back(segment);
    }
  }
  reader.finish();
  return profile;
}

TrackingSettings read_tracking(std::optional<ObjectReader> reader,
                               ReferenceProfile profile) {
  TrackingSettings settings;
  settings.profile = std::move(profile);
  if (reader) {
    if (auto design = reader->object("design")) {
      TrackingDesignSpec spec;
      spec.xi = design->positive_or("xi", spec.xi);
      spec.omega_n = design->positive_or("omega_n", spec.omega_n);
      design->finish();
      settings.design = spec;
    }
    if (auto gains = reader->object("gains")) {
      if (settings.design) {
        throw ConfigError(reader->path("gains"),
                          "give either \"design\" or \"gains\", not both");
      }
      TrackingGains g;
      const auto k1 = gains->number("k1");
      const auto k2 = gains->number("k2");
      const auto k3 = gains->number("k3");
      if (!k1 || !k2 || !k3) {
        throw ConfigError(gains->path(!k1 ? "k1" : !k2 ? "k2" : "k3"), "required");
      }
      g = {*k1, *k2, *k3};
      gains->finish();
      settings.gains = g;
    }
    settings.epsilon_v = reader->positive_or("epsilon_v", settings.epsilon_v);
    reader->finish();
  }
  if (!settings.design && !settings.gains) {
    settings.design = TrackingDesignSpec{};
  }
  return settings;
}

}  // namespace

void apply_override(json& document, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError(std::string(assignment), "override must look like key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json value = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) {
    value = text;
  }

  json* node = &document;
  std::size_t begin = 0;
  while (true) {
    const std::size_t dot = key.find('.', begin);
    const std::string part = key.substr(begin, dot - begin);
    if (part.empty()) {
      throw ConfigError(key, "empty component in override key");
    }
    if (node->is_null()) {
      *node = json::object();
    }
    if (!node->is_object()) {
      throw ConfigError(key, "override path runs through a non-object value");
    }
    if (dot == std::string::npos) {
      (*node)[part] = std::move(value);
      return;
    }
    node = &(*node)[part];
    begin = dot + 1;
  }
}

ScenarioConfig parse_scenario(json document, const std::vector<std::string>& overrides) {
  for (const std::string& assignment : overrides) {
    apply_override(document, assignment);
  }
  ObjectReader root(document, "");
  ScenarioConfig config;

  if (const auto mode = root.string("mode")) {
    if (*mode == "regulation") {
      config.mode = ScenarioMode::kRegulation;
    } else if (*mode == "tracking") {
      config.mode = ScenarioMode::kTracking;
    } else {
      throw ConfigError("mode", "expected \"regulation\" or \"tracking\"");
    }
  } else if (root.has("goal") && !root.has("profile")) {
    config.mode = ScenarioMode::kRegulation;
  } else if (root.has("profile") && !root.has("goal")) {
    config.mode = ScenarioMode::kTracking;
  } else {
    throw ConfigError("mode", "required unless exactly one of goal/profile is given");
  }
  const bool regulation = config.mode == ScenarioMode::kRegulation;

  if (const auto convention = root.string("heading_convention")) {
    if (*convention == "y_axis") {
      config.heading_convention = HeadingConvention::kYAxis;
    } else if (*convention == "x_axis") {
      config.heading_convention = HeadingConvention::kXAxis;
    } else {
      throw ConfigError("heading_convention", "expected \"y_axis\" or \"x_axis\"");
    }
  }
  const HeadingConvention convention = config.heading_convention;

  if (auto geom = root.object("geometry")) {
    config.geometry = read_geometry(*geom);
  }
  if (auto calib = root.object("calibration")) {
    config.calibration = read_calibration(*calib);
  }

  auto goal = root.object("goal");
  auto profile = root.object("profile");
  auto regulator = root.object("regulator");
  auto tracking = root.object("tracking");
  if (regulation) {
    if (!goal) {
      throw ConfigError("goal", "required for regulation");
    }
    if (profile || tracking) {
      throw ConfigError(profile ? "profile" : "tracking",
                        "not allowed in a regulation scenario");
    }
    config.regulation.goal.goal_pose = read_pose(*goal, convention);
    config.regulation = read_regulator(std::move(regulator), config.regulation);
  } else {
    if (!profile) {
      throw ConfigError("profile", "required for tracking");
    }
    if (goal || regulator) {
      throw ConfigError(goal ? "goal" : "regulator",
                        "not allowed in a tracking scenario");
    }
    config.tracking =
        read_tracking(std::move(tracking), read_profile(*profile, convention));
  }

  if (auto pose = root.object("initial_pose")) {
    config.initial_pose = read_pose(*pose, convention);
  } else if (regulation) {
    config.initial_pose = to_y_axis_heading(Pose{}, convention);
  } else {
    config.initial_pose = config.tracking.profile.initial_pose;
  }

  config.control_period = root.positive_or("control_period", config.control_period);
  config.plant_substep = root.positive_or("plant_substep", config.plant_substep);
  if (config.plant_substep > config.control_period * (1.0 + 1e-12)) {
    throw ConfigError("plant_substep", "must not exceed control_period");
  }
  const double default_max_time =
      regulation ? config.max_time : config.tracking.profile.total_duration();
  config.max_time = root.positive_or("max_time", default_max_time);
  config.features.use_odometry = root.boolean_or("use_odometry", config.features.use_odometry);
  config.features.clamp_power = root.boolean_or("clamp_power", config.features.clamp_power);
  config.features.ramp_enabled = root.boolean_or("ramp_enabled", config.features.ramp_enabled);
  root.finish();

  try {
    config.validate();
  } catch (const ReferenceTooSlow&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError("", e.what());
  }
  return config;
}

ScenarioConfig load_scenario(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("", "cannot open scenario file " + path.string());
  }
  json document;
  try {
    document = json::parse(in, nullptr, /*allow_exceptions=*/true,
                           /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("", fmt::format("{}: parse error: {}", path.string(), e.what()));
  }
  return parse_scenario(std::move(document), overrides);
}

const std::vector<std::string>& trace_csv_columns() {
  static const std::vector<std::string> columns = {
      "t",      "x_true",    "y_true",    "theta_true", "x_odo",   "y_odo",
      "theta_odo", "err1",   "err2",      "err3",       "v_cmd",   "omega_cmd",
      "wl_cmd", "wr_cmd",    "power_l",   "power_r",    "saturated"};
  return columns;
}

namespace {

struct ErrorColumns {
  double a, b, c;
};

ErrorColumns error_columns(const ErrorState& state) {
  if (const auto* err = std::get_if<TrackingError>(&state)) {
    return {err->e1, err->e2, err->e3};
  }
  const auto& polar = std::get<PolarState>(state);
  return {polar.r, polar.e_theta, polar.theta_E};
}

}  // namespace

void write_trace_csv(const SimTrace& trace, std::ostream& out) {
  const auto& columns = trace_csv_columns();
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out << (i == 0 ? "" : ",") << columns[i];
  }
  out << '\n';
  const HeadingConvention convention = trace.config.heading_convention;
  fmt::memory_buffer row;
  for (const StepRecord& rec : trace.records) {
    row.clear();
    const ErrorColumns err = error_columns(rec.error_state);
    const Pose truth = from_y_axis_heading(rec.pose_true, convention);
    const Pose odo = from_y_axis_heading(rec.pose_odo, convention);
    // Adding +0.0 turns -0 into 0 so zero commands print as "0".
    auto z = [](double value) { return value + 0.0; };
    fmt::format_to(std::back_inserter(row),
                   "{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},"
                   "{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:d}\n",
                   z(rec.t), z(truth.x), z(truth.y), z(truth.theta), z(odo.x), z(odo.y),
                   z(odo.theta), z(err.a), z(err.b), z(err.c), z(rec.command.v),
                   z(rec.command.omega), z(rec.wheel_cmds.omega_l),
                   z(rec.wheel_cmds.omega_r), z(rec.power_l.value), z(rec.power_r.value),
                   rec.saturated ? 1 : 0);
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

void emit_trace_csv(const SimTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot open " + path.string() + " for writing");
  }
  write_trace_csv(trace, out);
  out.flush();
  if (!out) {
    throw Error("failed writing " + path.string());
  }
}

namespace {

json pose_json(const Pose& pose) {
  return {{"x", pose.x}, {"y", pose.y}, {"theta", pose.theta}};
}

}  // namespace

json summary_to_json(const SimTrace& trace) {
  const SimSummary& s = trace.summary;
  const bool regulation = trace.config.mode == ScenarioMode::kRegulation;
  const HeadingConvention convention = trace.config.heading_convention;
  json out = {
      {"mode", regulation ? "regulation" : "tracking"},
      {"heading_convention",
       convention == HeadingConvention::kYAxis ? "y_axis" : "x_axis"},
      {"steps", trace.records.size()},
      {"final_time", s.final_time},
      {"final_pose_true", pose_json(from_y_axis_heading(s.final_pose_true, convention))},
      {"final_pose_odo", pose_json(from_y_axis_heading(s.final_pose_odo, convention))},
      {"initial_error_norm", s.initial_error_norm},
      {"final_error_norm", s.final_error_norm},
      {"rms_error_norm", s.rms_error_norm},
      {"peak_power", s.peak_power},
      {"peak_raw_power", s.peak_raw_power},
      {"saturation_count", s.saturation_count},
      {"converged", s.converged},
      {"diverged", s.diverged},
  };
  if (regulation) {
    out["final_heading_error"] = s.final_heading_error;
  }
  return out;
}

}  // namespace diffdrive
