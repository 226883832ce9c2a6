#pragma once

// NXT actuator and sensing path: wheel speed to motor power calibration with
// the +-100 power limit, whole-degree encoders, and odometry.

#include <cstdint>

#include "diffdrive/kinematics.hpp"

namespace diffdrive {

inline constexpr double kMaxPower = 100.0;

/// power = sgn(w) * (|w| * rad_to_deg * power_per_degps + power_offset)
struct MotorCalibration {
  double rad_to_deg = 57.2957;
  double power_per_degps = 0.1010;
  double power_offset = 0.4372;

  void validate() const;
  /// Power units per rad/s.
  double slope() const { return rad_to_deg * power_per_degps; }
};

struct PowerCommand {
  double value = 0.0;  // clamped to [-100, 100]
  bool saturated = false;
  double raw = 0.0;  // before clamping
};

PowerCommand wheel_speed_to_power(double omega, const MotorCalibration& calib);

/// Plant-side inverse of the calibration. Powers inside the dead zone
/// |power| <= power_offset produce no motion. Throws InvalidArgument for
/// |power| > 100.
double power_to_wheel_speed(double power, const MotorCalibration& calib);

/// As power_to_wheel_speed but without the +-100 precondition; used when the
/// simulator runs with clamping disabled.
double unclamped_power_to_wheel_speed(double power, const MotorCalibration& calib);

struct EncoderState {
  std::int64_t ticks = 0;  // whole degrees, cumulative
};

/// Quantizes a cumulative wheel angle to whole degrees, truncating toward
/// zero. Angles within 1e-9 degree of a whole degree count as that degree.
EncoderState encoder_update(EncoderState enc, double wheel_angle);

struct OdometryState {
  Pose pose_estimate;
  std::int64_t last_ticks_l = 0;
  std::int64_t last_ticks_r = 0;
};

/// Dead reckoning from encoder deltas with a midpoint heading update.
OdometryState odometry_update(const OdometryState& odo, std::int64_t ticks_l,
                              std::int64_t ticks_r, const RobotGeometry& geom);

}  // namespace diffdrive
