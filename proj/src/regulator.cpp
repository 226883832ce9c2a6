#include "diffdrive/regulator.hpp"

#include <cmath>

#include "diffdrive/errors.hpp"

namespace diffdrive {

void RampConfig::validate() const {
  if (!(alpha_r > 0.0 && alpha_etheta > 0.0 && alpha_thetaE > 0.0) ||
      !std::isfinite(alpha_r) || !std::isfinite(alpha_etheta) ||
      !std::isfinite(alpha_thetaE)) {
    throw InvalidArgument("ramp alphas must be positive and finite");
  }
}

namespace {

double sign_of(double value) { return value < 0.0 ? -1.0 : 1.0; }

}  // namespace

double atan2_custom(double y, double x) {
  if (y == 0.0) {
    if (x > 0.0) {
      return 0.0;
    }
    if (x == 0.0) {
      return 0.0;
    }
    return kPi;
  }
  if (x > 0.0) {
    return std::atan(y / x);
  }
  if (x == 0.0) {
    return kPi / 2.0 * sign_of(y);
  }
  return std::atan(y / x) + kPi * sign_of(y);
}

PolarState polar_transform(const Pose& pose, const GoalSpec& goal,
                           const PolarOptions& options) {
  const double dx = goal.goal_pose.x - pose.x;
  const double dy = goal.goal_pose.y - pose.y;
  const double r = std::hypot(dx, dy);
  if (r < options.r_stop) {
    return {0.0, 0.0, 0.0};
  }
  const double bearing = options.convention == HeadingConvention::kYAxis
                             ? atan2_custom(-dx, dy)
                             : atan2_custom(dy, dx);
  const double e_theta = wrap_angle(-pose.theta + bearing);
  const double theta_E = wrap_angle(-pose.theta - e_theta + goal.goal_pose.theta);
  return {r, e_theta, theta_E};
}

BodyTwist regulator_control(const PolarState& state, const RegulatorGains& gains) {
  return {gains.k_r * state.r,
          gains.k_etheta * state.e_theta + gains.k_thetaE * state.theta_E};
}

double ramp_factor(double alpha, double s) {
  if (!(alpha > 0.0)) {
    throw InvalidArgument("ramp_factor: alpha must be positive");
  }
  if (!(s >= 0.0)) {
    throw InvalidArgument("ramp_factor: argument must be non-negative");
  }
  return -std::expm1(-alpha * s);
}

RegulatorGains effective_gains(const RegulatorGains& base, const RampConfig& ramp,
                               double t, double r) {
  const double s = ramp.mode == RampMode::kTime ? t : r;
  return {base.k_r * ramp_factor(ramp.alpha_r, s),
          base.k_etheta * ramp_factor(ramp.alpha_etheta, s),
          base.k_thetaE * ramp_factor(ramp.alpha_thetaE, s)};
}

std::string to_string(StabilityCondition condition) {
  switch (condition) {
    case StabilityCondition::kDistanceGainPositive:
      return "k_r > 0";
    case StabilityCondition::kHeadingGainNegative:
      return "k_thetaE < 0";
    case StabilityCondition::kBearingGainExceedsDistance:
      return "k_etheta - k_r > 0";
  }
  return "unknown";
}

StabilityVerdict stability_check(const RegulatorGains& gains) {
  StabilityVerdict verdict;
  if (!(gains.k_r > 0.0)) {
    verdict.violated.push_back(StabilityCondition::kDistanceGainPositive);
  }
  if (!(gains.k_thetaE < 0.0)) {
    verdict.violated.push_back(StabilityCondition::kHeadingGainNegative);
  }
  if (!(gains.k_etheta - gains.k_r > 0.0)) {
    verdict.violated.push_back(StabilityCondition::kBearingGainExceedsDistance);
  }
  verdict.stable = verdict.violated.empty();
  return verdict;
}

Matrix3 regulator_linearized_matrix(const RegulatorGains& gains) {
  Matrix3 a;
  // clang-format off
  a << -gains.k_r, 0.0,                          0.0,
        0.0,       -(gains.k_etheta - gains.k_r), -gains.k_thetaE,
        0.0,       -gains.k_r,                    0.0;
  // clang-format on
  return a;
}

PolarRate regulator_nonlinear_derivative(const PolarState& state,
                                         const BodyTwist& twist,
                                         double r_singular) {
  if (!(state.r > r_singular)) {
    throw PolarSingularity(state.r, r_singular);
  }
  const double lateral = twist.v * std::sin(state.e_theta) / state.r;
  return {-twist.v * std::cos(state.e_theta), lateral - twist.omega, -lateral};
}

}  // namespace diffdrive
