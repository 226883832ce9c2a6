#pragma once

// Pose regulation in polar coordinates.
//
// The goal is described by its distance r, the bearing error e_theta between
// the robot heading and the line of sight to the goal, and theta_E, the angle
// still to be turned once the goal is reached along that line. The control
// law is
//
//   v = k_r r,   omega = k_etheta e_theta + k_thetaE theta_E,
//
// whose linearization is stable iff k_r > 0, k_thetaE < 0 and
// k_etheta - k_r > 0. Gains can be multiplied by per-gain ramps
// 1 - exp(-alpha s) so the commands start at zero instead of saturating the
// motors.

#include <string>
#include <vector>

#include "diffdrive/kinematics.hpp"
#include "diffdrive/roots.hpp"

namespace diffdrive {

struct PolarState {
  double r = 0.0;        // m, >= 0
  double e_theta = 0.0;  // rad
  double theta_E = 0.0;  // rad
};

struct PolarRate {
  double r_dot = 0.0;
  double e_theta_dot = 0.0;
  double theta_E_dot = 0.0;
};

struct RegulatorGains {
  double k_r = 0.4;
  double k_etheta = 2.0;
  double k_thetaE = -1.0;
};

enum class RampMode {
  kTime,      // ramp argument is elapsed time, alphas in 1/s
  kDistance,  // ramp argument is the goal distance r, alphas in 1/m
};

struct RampConfig {
  double alpha_r = 0.1;
  double alpha_etheta = 0.1;
  double alpha_thetaE = 0.3;
  RampMode mode = RampMode::kTime;

  void validate() const;
};

struct GoalSpec {
  Pose goal_pose;  // target position and final heading
};

struct PolarOptions {
  /// Heading convention of both the pose and the goal. The line-of-sight
  /// bearing is measured in the same convention: atan2(-dx, dy) for kYAxis,
  /// atan2(dy, dx) for kXAxis. Both give the same polar state for the same
  /// physical configuration.
  HeadingConvention convention = HeadingConvention::kYAxis;
  /// Below this distance the transform returns the terminal state (0, 0, 0).
  double r_stop = 0.0;
};

/// Four-quadrant arctangent assembled from the one-argument atan, in
/// (-pi, pi]. atan2_custom(0, 0) is 0 and atan2_custom(0, x < 0) is pi.
double atan2_custom(double y, double x);

PolarState polar_transform(const Pose& pose, const GoalSpec& goal,
                           const PolarOptions& options = {});

BodyTwist regulator_control(const PolarState& state, const RegulatorGains& gains);

/// 1 - exp(-alpha s). Throws InvalidArgument for alpha <= 0 or s < 0.
double ramp_factor(double alpha, double s);

/// Each gain times its own ramp factor. The ramp argument is t in time mode
/// and r in distance mode.
RegulatorGains effective_gains(const RegulatorGains& base, const RampConfig& ramp,
                               double t, double r);

enum class StabilityCondition {
  kDistanceGainPositive,     // k_r > 0
  kHeadingGainNegative,      // k_thetaE < 0
  kBearingGainExceedsDistance,  // k_etheta - k_r > 0
};

std::string to_string(StabilityCondition condition);

struct StabilityVerdict {
  bool stable = false;
  std::vector<StabilityCondition> violated;
};

/// Strict test of the three stability inequalities.
StabilityVerdict stability_check(const RegulatorGains& gains);

/// Linearization of the closed-loop polar dynamics about the goal.
Matrix3 regulator_linearized_matrix(const RegulatorGains& gains);

inline constexpr double kDefaultRSingular = 1e-6;  // m

/// r' = -v cos(e), e' = v sin(e) / r - omega, theta_E' = -v sin(e) / r.
/// Throws PolarSingularity when r <= r_singular.
PolarRate regulator_nonlinear_derivative(const PolarState& state,
                                         const BodyTwist& twist,
                                         double r_singular = kDefaultRSingular);

}  // namespace diffdrive
