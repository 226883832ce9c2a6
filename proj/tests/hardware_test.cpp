#include "diffdrive/hardware.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "diffdrive/errors.hpp"

namespace diffdrive {
namespace {

const MotorCalibration kCalib;
const RobotGeometry kNxt;
constexpr double kDeg = kPi / 180.0;

TEST(WheelSpeedToPower, Examples) {
  PowerCommand p = wheel_speed_to_power(0.0, kCalib);
  EXPECT_EQ(p.value, 0.0);
  EXPECT_FALSE(p.saturated);

  p = wheel_speed_to_power(1.0, kCalib);
  EXPECT_NEAR(p.value, 57.2957 * 0.1010 + 0.4372, 1e-12);
  EXPECT_NEAR(p.value, 6.22406, 1e-5);
  EXPECT_FALSE(p.saturated);

  p = wheel_speed_to_power(20.0, kCalib);
  EXPECT_NEAR(p.raw, 116.17, 0.01);
  EXPECT_EQ(p.value, 100.0);
  EXPECT_TRUE(p.saturated);

  p = wheel_speed_to_power(-1.0, kCalib);
  EXPECT_NEAR(p.value, -6.22406, 1e-5);
  p = wheel_speed_to_power(-20.0, kCalib);
  EXPECT_EQ(p.value, -100.0);
  EXPECT_TRUE(p.saturated);
}

TEST(WheelSpeedToPower, ClampProperty) {
  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> u(-40.0, 40.0);
  for (int i = 0; i < 10000; ++i) {
    const PowerCommand p = wheel_speed_to_power(u(rng), kCalib);
    ASSERT_LE(std::abs(p.value), 100.0);
    ASSERT_EQ(p.saturated, std::abs(p.raw) > 100.0);
    if (!p.saturated) {
      ASSERT_EQ(p.value, p.raw);
    }
  }
}

TEST(PowerToWheelSpeed, Examples) {
  EXPECT_EQ(power_to_wheel_speed(0.0, kCalib), 0.0);
  EXPECT_EQ(power_to_wheel_speed(0.3, kCalib), 0.0);  // dead zone
  EXPECT_NEAR(power_to_wheel_speed(57.2957 * 0.1010 + 0.4372, kCalib), 1.0, 1e-9);
  EXPECT_NEAR(power_to_wheel_speed(100.0, kCalib), (100 - 0.4372) / 0.1010 / 57.2957,
              1e-12);
  EXPECT_NEAR(power_to_wheel_speed(100.0, kCalib), 17.205, 1e-3);
  EXPECT_THROW(power_to_wheel_speed(100.5, kCalib), InvalidArgument);
  EXPECT_GT(unclamped_power_to_wheel_speed(150.0, kCalib), 17.21);
}

TEST(PowerToWheelSpeed, RoundTrip) {
  std::mt19937_64 rng(89);
  std::uniform_real_distribution<double> u(-17.0, 17.0);
  for (int i = 0; i < 10000; ++i) {
    const double omega = u(rng);
    ASSERT_NEAR(power_to_wheel_speed(wheel_speed_to_power(omega, kCalib).value, kCalib),
                omega, 1e-9);
  }
}

TEST(EncoderUpdate, Examples) {
  EXPECT_EQ(encoder_update({}, 0.0).ticks, 0);
  EXPECT_EQ(encoder_update({}, kTwoPi).ticks, 360);
  EXPECT_EQ(encoder_update({}, 0.9999 * kDeg).ticks, 0);
  EXPECT_EQ(encoder_update({}, -0.9999 * kDeg).ticks, 0);
  EXPECT_EQ(encoder_update({}, -1.5 * kDeg).ticks, -1);
}

TEST(EncoderUpdate, ExactOnWholeDegrees) {
  for (int d = -2000; d <= 2000; ++d) {
    ASSERT_EQ(encoder_update({}, d * kDeg).ticks, d);
  }
}

TEST(EncoderUpdate, Monotone) {
  std::int64_t previous = encoder_update({}, -10.0).ticks;
  for (double a = -10.0; a < 10.0; a += 1e-4) {
    const std::int64_t ticks = encoder_update({}, a).ticks;
    ASSERT_GE(ticks, previous);
    previous = ticks;
  }
}

TEST(OdometryUpdate, Examples) {
  OdometryState odo = odometry_update({}, 360, 360, kNxt);
  EXPECT_NEAR(odo.pose_estimate.x, 0.0, 1e-15);
  EXPECT_NEAR(odo.pose_estimate.y, 0.0275 * kTwoPi, 1e-15);
  EXPECT_NEAR(odo.pose_estimate.y, 0.172788, 1e-6);
  EXPECT_EQ(odo.pose_estimate.theta, 0.0);
  EXPECT_EQ(odo.last_ticks_l, 360);

  const OdometryState same = odometry_update(odo, 360, 360, kNxt);
  EXPECT_EQ(same.pose_estimate.x, odo.pose_estimate.x);
  EXPECT_EQ(same.pose_estimate.y, odo.pose_estimate.y);
  EXPECT_EQ(same.pose_estimate.theta, odo.pose_estimate.theta);

  odo = odometry_update({}, -360, 360, kNxt);
  EXPECT_EQ(odo.pose_estimate.x, 0.0);
  EXPECT_EQ(odo.pose_estimate.y, 0.0);
  EXPECT_NEAR(odo.pose_estimate.theta, 0.0275 * 4 * kPi / 0.135, 1e-12);
  EXPECT_NEAR(odo.pose_estimate.theta, 2.5598, 1e-4);
}

TEST(OdometryUpdate, ArcIsExactForMidpointRule) {
  // One arc of constant curvature: the midpoint rule reproduces the chord
  // direction, so only the chord length differs from the arc.
  const int ticks_l = 10;
  const int ticks_r = 14;
  const OdometryState odo = odometry_update({}, ticks_l, ticks_r, kNxt);
  const BodyTwist twist = wheels_to_twist({ticks_l * kDeg, ticks_r * kDeg}, kNxt);
  const Pose exact = propagate_constant_twist(Pose(), twist, 1.0);
  EXPECT_NEAR(odo.pose_estimate.theta, exact.theta, 1e-15);
  EXPECT_NEAR(std::atan2(odo.pose_estimate.y, odo.pose_estimate.x),
              std::atan2(exact.y, exact.x), 1e-12);
  EXPECT_NEAR(std::hypot(odo.pose_estimate.x - exact.x, odo.pose_estimate.y - exact.y),
              0.0, 1e-7);
}

TEST(OdometryUpdate, StraightMeterWithinOneQuantum) {
  // Drive 1 m straight in 30 ms periods, quantizing the wheel angle each time.
  const double omega = 0.2 / kNxt.wheel_radius;
  OdometryState odo;
  double angle = 0.0;
  Pose truth;
  EncoderState enc;
  for (int k = 0; k < 167; ++k) {
    angle += omega * 0.03;
    truth = propagate_constant_twist(truth, {0.2, 0.0}, 0.03);
    enc = encoder_update(enc, angle);
    odo = odometry_update(odo, enc.ticks, enc.ticks, kNxt);
  }
  ASSERT_GE(truth.y, 1.0);
  EXPECT_LE(std::hypot(odo.pose_estimate.x - truth.x, odo.pose_estimate.y - truth.y),
            kNxt.wheel_radius * kDeg);
}

TEST(MotorCalibration, Validate) {
  EXPECT_NO_THROW(kCalib.validate());
  EXPECT_THROW((MotorCalibration{0.0, 0.1, 0.4}.validate()), InvalidArgument);
  EXPECT_THROW((MotorCalibration{57.0, -0.1, 0.4}.validate()), InvalidArgument);
  EXPECT_THROW((MotorCalibration{57.0, 0.1, -0.4}.validate()), InvalidArgument);
}

}  // namespace
}  // namespace diffdrive
