#pragma once

// Closed-loop executor emulating the NXT control loop. Each control period:
//
//   1. read whole-degree encoders and update odometry,
//   2. run the controller on the odometry pose (or the true pose),
//   3. convert the twist to wheel speeds and motor power, clamping to +-100,
//   4. drive the plant with the speeds that power produces, integrating the
//      unicycle model with RK4 at the plant substep.
//
// Runs are deterministic: the same config always yields the same trace.

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "diffdrive/hardware.hpp"
#include "diffdrive/kinematics.hpp"
#include "diffdrive/regulator.hpp"
#include "diffdrive/tracking.hpp"
#include "diffdrive/trajectory.hpp"

namespace diffdrive {

enum class ScenarioMode { kTracking, kRegulation };

struct RegulationSettings {
  GoalSpec goal;
  RegulatorGains gains;  // defaults k_r = 0.4, k_etheta = 2, k_thetaE = -1
  RampConfig ramp;       // defaults alphas (0.1, 0.1, 0.3), time mode
  double r_stop = 0.01;      // m
  double theta_stop = 0.05;  // rad
};

struct TrackingSettings {
  ReferenceProfile profile;
  /// Exactly one of design / gains is used; design wins when both are set.
  std::optional<TrackingDesignSpec> design;
  std::optional<TrackingGains> gains;
  double epsilon_v = kDefaultEpsilonV;
};

struct FeatureFlags {
  bool use_odometry = true;
  bool clamp_power = true;
  bool ramp_enabled = true;
};

/// All poses in a config (initial pose, goal, profile start) use the native
/// y-axis heading convention. `heading_convention` only records how headings
/// are written in scenario files and trace output.
struct ScenarioConfig {
  ScenarioMode mode = ScenarioMode::kRegulation;
  HeadingConvention heading_convention = HeadingConvention::kYAxis;
  RobotGeometry geometry;
  MotorCalibration calibration;
  Pose initial_pose;
  RegulationSettings regulation;
  TrackingSettings tracking;
  double control_period = 0.03;  // s
  double plant_substep = 0.001;  // s
  double max_time = 60.0;        // s
  FeatureFlags features;

  /// Throws InvalidArgument naming the first violated invariant.
  void validate() const;
};

using ErrorState = std::variant<TrackingError, PolarState>;

/// One control period. Poses are sampled at t, before the command is applied.
struct StepRecord {
  double t = 0.0;
  Pose pose_true;
  Pose pose_odo;
  ErrorState error_state;  // as seen by the controller
  BodyTwist command;
  WheelSpeeds wheel_cmds;
  PowerCommand power_l;
  PowerCommand power_r;
  bool saturated = false;
};

struct SimSummary {
  double final_time = 0.0;
  Pose final_pose_true;
  Pose final_pose_odo;
  /// Tracking: norm of the true-pose tracking error. Regulation: distance to
  /// the goal.
  double initial_error_norm = 0.0;
  double final_error_norm = 0.0;
  double rms_error_norm = 0.0;
  /// Regulation only: true-pose heading error to the goal heading.
  double final_heading_error = 0.0;
  double peak_power = 0.0;      // max |applied power|
  double peak_raw_power = 0.0;  // max |unclamped power|
  std::size_t saturation_count = 0;
  bool converged = false;
  bool diverged = false;
  double wall_time_s = 0.0;
};

struct SimTrace {
  ScenarioConfig config;
  std::vector<StepRecord> records;
  SimSummary summary;
};

/// Stepwise simulator. Owns all of its state.
class Simulator {
 public:
  /// Validates the config; throws InvalidArgument or ReferenceTooSlow.
  explicit Simulator(ScenarioConfig config);

  /// Runs one control period: measure, control, actuate.
  const StepRecord& step();

  /// Sends `command` through the wheel/power/plant path for one period,
  /// bypassing the controller.
  const StepRecord& apply_command(const BodyTwist& command);

  /// True once the run converged, diverged or reached max_time.
  bool finished() const;

  SimTrace run();

  double time() const;
  const Pose& true_pose() const { return true_pose_; }
  const OdometryState& odometry() const { return odometry_; }
  const EncoderState& left_encoder() const { return encoder_l_; }
  const EncoderState& right_encoder() const { return encoder_r_; }
  double left_wheel_angle() const { return wheel_angle_l_; }
  double right_wheel_angle() const { return wheel_angle_r_; }
  const std::vector<StepRecord>& records() const { return records_; }
  bool converged() const { return converged_; }
  bool diverged() const { return diverged_; }

 private:
  struct Decision {
    ErrorState error_state;
    BodyTwist command;
  };

  void measure();
  Decision decide(double t, const Pose& feedback);
  Decision decide_regulation(double t, const Pose& feedback);
  Decision decide_tracking(double t, const Pose& feedback);
  const StepRecord& actuate(double t, const ErrorState& error_state,
                            const BodyTwist& command);
  SimSummary summarize(double wall_time_s) const;

  ScenarioConfig config_;
  int substeps_ = 1;
  std::size_t step_index_ = 0;
  std::size_t max_steps_ = 0;
  Pose true_pose_;
  double wheel_angle_l_ = 0.0;
  double wheel_angle_r_ = 0.0;
  EncoderState encoder_l_;
  EncoderState encoder_r_;
  OdometryState odometry_;
  std::optional<TrackingGains> last_tracking_gains_;
  std::vector<StepRecord> records_;
  bool converged_ = false;
  bool diverged_ = false;
};

/// Both throw InvalidArgument when the config's mode does not match.
SimTrace run_regulation(const ScenarioConfig& config);
SimTrace run_tracking(const ScenarioConfig& config);
/// Dispatches on config.mode.
SimTrace run_scenario(const ScenarioConfig& config);

}  // namespace diffdrive
