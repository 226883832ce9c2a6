#include "diffdrive/kinematics.hpp"

#include <cmath>

#include "diffdrive/errors.hpp"

namespace diffdrive {

double wrap_angle(double theta) {
  double wrapped = std::remainder(theta, kTwoPi);
  if (wrapped <= -kPi) {
    wrapped += kTwoPi;
  }
  return wrapped;
}

Pose::Pose(double x_m, double y_m, double theta_rad)
    : x(x_m), y(y_m), theta(wrap_angle(theta_rad)) {}

bool Pose::is_finite() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(theta);
}

void RobotGeometry::validate() const {
  if (!(std::isfinite(wheel_radius) && wheel_radius > 0.0)) {
    throw InvalidArgument("wheel_radius must be positive");
  }
  if (!(std::isfinite(axle_length) && axle_length > 0.0)) {
    throw InvalidArgument("axle_length must be positive");
  }
}

Pose to_y_axis_heading(const Pose& pose, HeadingConvention convention) {
  if (convention == HeadingConvention::kYAxis) {
    return pose;
  }
  return Pose(pose.x, pose.y, pose.theta - kPi / 2.0);
}

Pose from_y_axis_heading(const Pose& pose, HeadingConvention convention) {
  if (convention == HeadingConvention::kYAxis) {
    return pose;
  }
  return Pose(pose.x, pose.y, pose.theta + kPi / 2.0);
}

PoseRate pose_derivative(const Pose& pose, const BodyTwist& twist) {
  return {-twist.v * std::sin(pose.theta), twist.v * std::cos(pose.theta),
          twist.omega};
}

BodyTwist wheels_to_twist(const WheelSpeeds& wheels, const RobotGeometry& geom) {
  const double c = geom.wheel_radius;
  return {(wheels.omega_l + wheels.omega_r) * c / 2.0,
          (wheels.omega_r - wheels.omega_l) * c / geom.axle_length};
}

WheelSpeeds twist_to_wheels(const BodyTwist& twist, const RobotGeometry& geom) {
  const double half_axle = geom.axle_length / 2.0;
  return {(twist.v - half_axle * twist.omega) / geom.wheel_radius,
          (twist.v + half_axle * twist.omega) / geom.wheel_radius};
}

namespace {

struct State {
  double x, y, theta;
};

State rate(const State& s, const BodyTwist& twist) {
  return {-twist.v * std::sin(s.theta), twist.v * std::cos(s.theta),
          twist.omega};
}

State axpy(const State& s, double h, const State& d) {
  return {s.x + h * d.x, s.y + h * d.y, s.theta + h * d.theta};
}

}  // namespace

Pose integrate_pose(const Pose& pose, const BodyTwist& twist, double dt,
                    int substeps) {
  if (!(dt > 0.0)) {
    throw InvalidArgument("integrate_pose: dt must be positive");
  }
  if (substeps < 1) {
    throw InvalidArgument("integrate_pose: substeps must be >= 1");
  }
  const double h = dt / substeps;
  // theta is carried unwrapped across substeps and wrapped once at the end.
  State s{pose.x, pose.y, pose.theta};
  for (int i = 0; i < substeps; ++i) {
    const State k1 = rate(s, twist);
    const State k2 = rate(axpy(s, h / 2.0, k1), twist);
    const State k3 = rate(axpy(s, h / 2.0, k2), twist);
    const State k4 = rate(axpy(s, h, k3), twist);
    s.x += h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    s.y += h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
    s.theta += h / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta);
  }
  return Pose(s.x, s.y, s.theta);
}

Pose propagate_constant_twist(const Pose& pose, const BodyTwist& twist,
                              double dt) {
  // Chord form: displacement = v dt sinc(omega dt / 2) along the mid-heading.
  // Stays accurate as omega -> 0.
  const double half_turn = 0.5 * twist.omega * dt;
  const double sinc = std::abs(half_turn) < 1e-4
                          ? 1.0 - half_turn * half_turn / 6.0
                          : std::sin(half_turn) / half_turn;
  const double chord = twist.v * dt * sinc;
  const double mid_heading = pose.theta + half_turn;
  return Pose(pose.x - chord * std::sin(mid_heading),
              pose.y + chord * std::cos(mid_heading),
              pose.theta + twist.omega * dt);
}

}  // namespace diffdrive
