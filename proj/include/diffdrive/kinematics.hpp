#pragma once

// Differential-drive and unicycle kinematics.
//
// Heading convention: theta = 0 points along +y, and positive theta turns
// counter-clockwise. A unicycle moving with speed v therefore has
//
//   x' = -v sin(theta),  y' = v cos(theta),  theta' = omega.
//
// Everything in this library (reference profiles, tracking errors, polar
// regulator state, odometry) uses this convention. Poses written with the
// more common x-axis convention (theta = 0 along +x) can be converted with
// to_y_axis_heading / from_y_axis_heading.

#include <numbers>

namespace diffdrive {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle to (-pi, pi]. -pi maps to +pi.
double wrap_angle(double theta);

/// Planar configuration of the robot: back-axle midpoint and heading.
/// The constructor wraps theta.
struct Pose {
  double x = 0.0;      // m
  double y = 0.0;      // m
  double theta = 0.0;  // rad, in (-pi, pi]

  Pose() = default;
  Pose(double x_m, double y_m, double theta_rad);

  bool is_finite() const;
};

struct PoseRate {
  double x_dot = 0.0;
  double y_dot = 0.0;
  double theta_dot = 0.0;
};

/// Unicycle command: forward speed (m/s) and turn rate (rad/s).
struct BodyTwist {
  double v = 0.0;
  double omega = 0.0;
};

/// Wheel angular velocities in rad/s.
struct WheelSpeeds {
  double omega_l = 0.0;
  double omega_r = 0.0;
};

/// Defaults are the NXT platform values: 27.5 mm wheels on a 135 mm axle.
struct RobotGeometry {
  double wheel_radius = 0.0275;  // m
  double axle_length = 0.135;    // m

  /// Throws InvalidArgument unless both lengths are finite and positive.
  void validate() const;
};

/// Zero reference of a heading angle.
enum class HeadingConvention {
  kYAxis,  // theta = 0 along +y; the native convention
  kXAxis,  // theta = 0 along +x
};

/// Converts a pose whose heading uses `convention` to the native convention.
/// Positions are unchanged; theta_y = theta_x - pi/2.
Pose to_y_axis_heading(const Pose& pose, HeadingConvention convention);
/// Inverse of to_y_axis_heading.
Pose from_y_axis_heading(const Pose& pose, HeadingConvention convention);

PoseRate pose_derivative(const Pose& pose, const BodyTwist& twist);

/// v = c (w_l + w_r) / 2,  omega = c (w_r - w_l) / b.
BodyTwist wheels_to_twist(const WheelSpeeds& wheels, const RobotGeometry& geom);

/// Inverse of wheels_to_twist.
WheelSpeeds twist_to_wheels(const BodyTwist& twist, const RobotGeometry& geom);

/// Integrates the unicycle model over dt with the twist held constant,
/// using `substeps` classical RK4 steps. Throws InvalidArgument for dt <= 0
/// or substeps < 1.
Pose integrate_pose(const Pose& pose, const BodyTwist& twist, double dt,
                    int substeps);

/// Exact solution of the unicycle model under a constant twist.
Pose propagate_constant_twist(const Pose& pose, const BodyTwist& twist,
                              double dt);

}  // namespace diffdrive
