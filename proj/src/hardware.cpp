#include "diffdrive/hardware.hpp"

#include <algorithm>
#include <cmath>

#include "diffdrive/errors.hpp"

namespace diffdrive {

namespace {

constexpr double kDegPerRad = 180.0 / kPi;
constexpr double kRadPerDeg = kPi / 180.0;
constexpr double kWholeDegreeSnap = 1e-9;

double sign_or_zero(double value) {
  return static_cast<double>((0.0 < value) - (value < 0.0));
}

}  // namespace

void MotorCalibration::validate() const {
  if (!(std::isfinite(rad_to_deg) && rad_to_deg > 0.0)) {
    throw InvalidArgument("rad_to_deg must be positive");
  }
  if (!(std::isfinite(power_per_degps) && power_per_degps > 0.0)) {
    throw InvalidArgument("power_per_degps must be positive");
  }
  if (!(std::isfinite(power_offset) && power_offset >= 0.0 &&
        power_offset < kMaxPower)) {
    throw InvalidArgument("power_offset must lie in [0, 100)");
  }
}

PowerCommand wheel_speed_to_power(double omega, const MotorCalibration& calib) {
  const double raw = omega * calib.slope() + calib.power_offset * sign_or_zero(omega);
  return {std::clamp(raw, -kMaxPower, kMaxPower), std::abs(raw) > kMaxPower, raw};
}

double unclamped_power_to_wheel_speed(double power, const MotorCalibration& calib) {
  const double magnitude = std::abs(power);
  if (magnitude <= calib.power_offset) {
    return 0.0;
  }
  return sign_or_zero(power) * (magnitude - calib.power_offset) / calib.slope();
}

double power_to_wheel_speed(double power, const MotorCalibration& calib) {
  if (!(std::abs(power) <= kMaxPower)) {
    throw InvalidArgument("power_to_wheel_speed: |power| must not exceed 100");
  }
  return unclamped_power_to_wheel_speed(power, calib);
}

EncoderState encoder_update(EncoderState enc, double wheel_angle) {
  if (!std::isfinite(wheel_angle)) {
    throw InvalidArgument("encoder_update: wheel angle must be finite");
  }
  double degrees = wheel_angle * kDegPerRad;
  const double nearest = std::round(degrees);
  if (std::abs(degrees - nearest) <= kWholeDegreeSnap) {
    degrees = nearest;
  }
  enc.ticks = static_cast<std::int64_t>(std::trunc(degrees));
  return enc;
}

OdometryState odometry_update(const OdometryState& odo, std::int64_t ticks_l,
                              std::int64_t ticks_r, const RobotGeometry& geom) {
  const double dphi_l = static_cast<double>(ticks_l - odo.last_ticks_l) * kRadPerDeg;
  const double dphi_r = static_cast<double>(ticks_r - odo.last_ticks_r) * kRadPerDeg;
  const double ds = geom.wheel_radius * (dphi_l + dphi_r) / 2.0;
  const double dtheta = geom.wheel_radius * (dphi_r - dphi_l) / geom.axle_length;
  const Pose& p = odo.pose_estimate;
  const double mid_heading = p.theta + dtheta / 2.0;
  return {Pose(p.x - ds * std::sin(mid_heading), p.y + ds * std::cos(mid_heading),
               p.theta + dtheta),
          ticks_l, ticks_r};
}

}  // namespace diffdrive
