#include "diffdrive/regulator.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "diffdrive/errors.hpp"

namespace diffdrive {
namespace {

constexpr HeadingConvention kX = HeadingConvention::kXAxis;

GoalSpec goal_at(double x, double y, double theta) { return {Pose(x, y, theta)}; }

TEST(Atan2Custom, Examples) {
  EXPECT_EQ(atan2_custom(0.0, 1.0), 0.0);
  EXPECT_EQ(atan2_custom(0.0, 0.0), 0.0);
  EXPECT_EQ(atan2_custom(0.0, -1.0), kPi);
  EXPECT_NEAR(atan2_custom(1.0, 1.0), kPi / 4, 1e-15);
  EXPECT_NEAR(atan2_custom(1.0, -1.0), 3 * kPi / 4, 1e-15);
  EXPECT_NEAR(atan2_custom(-1.0, -1.0), -3 * kPi / 4, 1e-15);
}

TEST(Atan2Custom, MatchesStdAtan2) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> exponent(-8.0, 8.0);
  for (int i = 0; i < 100000; ++i) {
    const double y = u(rng) * std::pow(10.0, exponent(rng));
    const double x = u(rng) * std::pow(10.0, exponent(rng));
    ASSERT_NEAR(atan2_custom(y, x), std::atan2(y, x), 1e-12) << y << ", " << x;
  }
  for (int k = 0; k < 8; ++k) {
    const double y = std::round(std::sin(k * kPi / 4) * 2) / 2;
    const double x = std::round(std::cos(k * kPi / 4) * 2) / 2;
    EXPECT_NEAR(atan2_custom(y, x), std::atan2(y, x), 1e-12) << k;
  }
}

TEST(PolarTransform, ExamplesInXAxisHeading) {
  PolarState s = polar_transform(Pose(0, 0, 0), goal_at(1, 1, 0), {kX});
  EXPECT_NEAR(s.r, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s.e_theta, kPi / 4, 1e-15);
  EXPECT_NEAR(s.theta_E, -kPi / 4, 1e-15);

  s = polar_transform(Pose(0, 0, kPi / 2), goal_at(1, 1, kPi), {kX});
  EXPECT_NEAR(s.r, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s.e_theta, -kPi / 4, 1e-15);
  EXPECT_NEAR(s.theta_E, 3 * kPi / 4, 1e-15);
}

TEST(PolarTransform, TerminalStateBelowStopRadius) {
  const PolarState s =
      polar_transform(Pose(1.0, 1.0 + 1e-3, 0.4), goal_at(1, 1, 0.4), {{}, 0.01});
  EXPECT_EQ(s.r, 0.0);
  EXPECT_EQ(s.e_theta, 0.0);
  EXPECT_EQ(s.theta_E, 0.0);
}

TEST(PolarTransform, IndependentOfHeadingConvention) {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 10000; ++i) {
    const Pose pose_x(u(rng), u(rng), u(rng));
    const Pose goal_x(u(rng), u(rng), u(rng));
    const PolarState a = polar_transform(pose_x, {goal_x}, {kX});
    const PolarState b = polar_transform(to_y_axis_heading(pose_x, kX),
                                         {to_y_axis_heading(goal_x, kX)});
    ASSERT_NEAR(a.r, b.r, 1e-15);
    ASSERT_NEAR(std::remainder(a.e_theta - b.e_theta, kTwoPi), 0.0, 1e-12);
    ASSERT_NEAR(std::remainder(a.theta_E - b.theta_E, kTwoPi), 0.0, 1e-12);
  }
}

TEST(PolarTransform, ScaleCovariance) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const Pose goal(u(rng), u(rng), u(rng));
    const double dx = u(rng);
    const double dy = u(rng);
    const double theta = u(rng);
    const PolarState a = polar_transform(Pose(goal.x - dx, goal.y - dy, theta), {goal});
    const PolarState b =
        polar_transform(Pose(goal.x - 2 * dx, goal.y - 2 * dy, theta), {goal});
    ASSERT_NEAR(b.r, 2 * a.r, 1e-12);
    ASSERT_NEAR(std::remainder(b.e_theta - a.e_theta, kTwoPi), 0.0, 1e-9);
    ASSERT_NEAR(std::remainder(b.theta_E - a.theta_E, kTwoPi), 0.0, 1e-9);
  }
}

TEST(PolarTransform, HeadOnGoalHasZeroBearing) {
  // Facing +y with the goal straight ahead.
  const PolarState s = polar_transform(Pose(0, 0, 0), goal_at(0, 2, 0));
  EXPECT_EQ(s.r, 2.0);
  EXPECT_EQ(s.e_theta, 0.0);
  EXPECT_EQ(s.theta_E, 0.0);
}

TEST(RegulatorControl, Examples) {
  const RegulatorGains g{0.4, 2.0, -1.0};
  BodyTwist u = regulator_control({1, 0, 0}, g);
  EXPECT_DOUBLE_EQ(u.v, 0.4);
  EXPECT_EQ(u.omega, 0.0);
  u = regulator_control({0, 0, 0}, {3.0, -7.0, 5.0});
  EXPECT_EQ(u.v, 0.0);
  EXPECT_EQ(u.omega, 0.0);
  u = regulator_control({2, 0.5, -0.2}, g);
  EXPECT_DOUBLE_EQ(u.v, 0.8);
  EXPECT_DOUBLE_EQ(u.omega, 1.2);
}

TEST(RampFactor, Examples) {
  EXPECT_EQ(ramp_factor(0.1, 0.0), 0.0);
  EXPECT_NEAR(ramp_factor(0.1, 10.0), 1.0 - std::exp(-1.0), 1e-15);
  EXPECT_NEAR(ramp_factor(2.0, 20.0), 1.0, 1e-15);
  EXPECT_THROW(ramp_factor(0.0, 1.0), InvalidArgument);
  EXPECT_THROW(ramp_factor(0.1, -1.0), InvalidArgument);
}

TEST(RampFactor, MonotoneAndBounded) {
  double previous = -1.0;
  for (double s = 0.0; s < 30.0; s += 0.01) {
    const double f = ramp_factor(0.3, s);
    ASSERT_GT(f, previous);
    ASSERT_GE(f, 0.0);
    ASSERT_LT(f, 1.0);
    previous = f;
  }
}

TEST(EffectiveGains, Examples) {
  const RegulatorGains base{0.4, 2.0, -1.0};
  const RampConfig ramp{0.1, 0.1, 0.3, RampMode::kTime};
  RegulatorGains g = effective_gains(base, ramp, 0.0, 5.0);
  EXPECT_EQ(g.k_r, 0.0);
  EXPECT_EQ(g.k_etheta, 0.0);
  EXPECT_EQ(g.k_thetaE, 0.0);

  g = effective_gains(base, ramp, 10.0, 5.0);
  EXPECT_NEAR(g.k_r, 0.4 * (1 - std::exp(-1.0)), 1e-15);
  EXPECT_NEAR(g.k_etheta, 2.0 * (1 - std::exp(-1.0)), 1e-15);
  EXPECT_NEAR(g.k_thetaE, -(1 - std::exp(-3.0)), 1e-15);
  EXPECT_NEAR(g.k_r, 0.25285, 1e-5);
  EXPECT_NEAR(g.k_etheta, 1.26424, 1e-5);
  EXPECT_NEAR(g.k_thetaE, -0.95021, 1e-5);

  g = effective_gains(base, ramp, 1e4, 5.0);
  EXPECT_NEAR(g.k_r, 0.4, 1e-12);
  EXPECT_NEAR(g.k_etheta, 2.0, 1e-12);
  EXPECT_NEAR(g.k_thetaE, -1.0, 1e-12);
}

TEST(EffectiveGains, DistanceModeUsesR) {
  const RampConfig ramp{0.1, 0.1, 0.3, RampMode::kDistance};
  const RegulatorGains g = effective_gains({0.4, 2.0, -1.0}, ramp, 1e6, 10.0);
  EXPECT_NEAR(g.k_r, 0.4 * (1 - std::exp(-1.0)), 1e-15);
}

TEST(StabilityCheck, Examples) {
  StabilityVerdict v = stability_check({0.4, 2.0, -1.0});
  EXPECT_TRUE(v.stable);
  EXPECT_TRUE(v.violated.empty());

  v = stability_check({0.4, 0.3, -1.0});
  EXPECT_FALSE(v.stable);
  ASSERT_EQ(v.violated.size(), 1u);
  EXPECT_EQ(v.violated[0], StabilityCondition::kBearingGainExceedsDistance);

  v = stability_check({-0.1, 2.0, -1.0});
  ASSERT_EQ(v.violated.size(), 1u);
  EXPECT_EQ(v.violated[0], StabilityCondition::kDistanceGainPositive);

  v = stability_check({0.4, 2.0, 1.0});
  ASSERT_EQ(v.violated.size(), 1u);
  EXPECT_EQ(v.violated[0], StabilityCondition::kHeadingGainNegative);

  v = stability_check({1.0, 1.0, -1.0});  // equality fails the strict test
  ASSERT_EQ(v.violated.size(), 1u);
  EXPECT_EQ(v.violated[0], StabilityCondition::kBearingGainExceedsDistance);
  EXPECT_EQ(to_string(v.violated[0]), "k_etheta - k_r > 0");
}

TEST(StabilityCheck, AgreesWithEigenvalues) {
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  int tested = 0;
  while (tested < 10000) {
    const RegulatorGains g{u(rng), u(rng), u(rng)};
    if (std::abs(g.k_r) < 1e-6 || std::abs(g.k_thetaE) < 1e-6 ||
        std::abs(g.k_etheta - g.k_r) < 1e-6) {
      continue;
    }
    ++tested;
    bool hurwitz = true;
    for (const auto& z : characteristic_roots(regulator_linearized_matrix(g))) {
      hurwitz = hurwitz && z.real() < 0.0;
    }
    ASSERT_EQ(stability_check(g).stable, hurwitz)
        << g.k_r << " " << g.k_etheta << " " << g.k_thetaE;
  }
}

TEST(LinearizedMatrix, Examples) {
  Matrix3 expected;
  expected << -0.4, 0, 0, 0, -1.6, 1, 0, -0.4, 0;
  EXPECT_TRUE(regulator_linearized_matrix({0.4, 2.0, -1.0}).isApprox(expected, 1e-15));
  EXPECT_EQ(regulator_linearized_matrix({0, 0, 0}), Matrix3::Zero());
}

Eigen::Vector3d closed_loop_rate(const RegulatorGains& g, double r, double e,
                                 double theta_E) {
  const PolarState s{r, e, theta_E};
  const PolarRate d = regulator_nonlinear_derivative(s, regulator_control(s, g));
  return {d.r_dot, d.e_theta_dot, d.theta_E_dot};
}

TEST(LinearizedMatrix, IsJacobianOfClosedLoop) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const RegulatorGains g{u(rng), u(rng), u(rng)};
    const double h = 1e-6;
    Matrix3 jac;
    jac.col(0) = (closed_loop_rate(g, 1 + h, 0, 0) - closed_loop_rate(g, 1 - h, 0, 0)) / (2 * h);
    jac.col(1) = (closed_loop_rate(g, 1, h, 0) - closed_loop_rate(g, 1, -h, 0)) / (2 * h);
    jac.col(2) = (closed_loop_rate(g, 1, 0, h) - closed_loop_rate(g, 1, 0, -h)) / (2 * h);
    ASSERT_LE((jac - regulator_linearized_matrix(g)).cwiseAbs().maxCoeff(), 1e-7);
  }
}

TEST(NonlinearDerivative, Examples) {
  PolarRate d = regulator_nonlinear_derivative({1, 0, 0}, {0.4, 0});
  EXPECT_DOUBLE_EQ(d.r_dot, -0.4);
  EXPECT_EQ(d.e_theta_dot, 0.0);
  EXPECT_EQ(d.theta_E_dot, 0.0);

  d = regulator_nonlinear_derivative({1, kPi / 2, 0}, {0.4, 0});
  EXPECT_NEAR(d.r_dot, 0.0, 1e-16);
  EXPECT_DOUBLE_EQ(d.e_theta_dot, 0.4);
  EXPECT_DOUBLE_EQ(d.theta_E_dot, -0.4);

  d = regulator_nonlinear_derivative({0.7, 0.3, -0.2}, {0.0, 1.0});
  EXPECT_EQ(d.r_dot, 0.0);
  EXPECT_EQ(d.e_theta_dot, -1.0);
  EXPECT_EQ(d.theta_E_dot, 0.0);

  EXPECT_THROW(regulator_nonlinear_derivative({1e-6, 0, 0}, {0.4, 0}), PolarSingularity);
  EXPECT_THROW(regulator_nonlinear_derivative({0.05, 0, 0}, {0.4, 0}, 0.1),
               PolarSingularity);
}

TEST(NonlinearDerivative, ClosedLoopSubstitution) {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 10000; ++i) {
    const RegulatorGains g{u(rng), u(rng), u(rng)};
    const PolarState s{std::abs(u(rng)) + 1e-3, u(rng), u(rng)};
    const PolarRate d = regulator_nonlinear_derivative(s, regulator_control(s, g));
    const double sin_e = std::sin(s.e_theta);
    ASSERT_NEAR(d.r_dot, -g.k_r * s.r * std::cos(s.e_theta), 1e-12);
    ASSERT_NEAR(d.e_theta_dot,
                g.k_r * sin_e - g.k_etheta * s.e_theta - g.k_thetaE * s.theta_E, 1e-12);
    ASSERT_NEAR(d.theta_E_dot, -g.k_r * sin_e, 1e-12);
  }
}

TEST(NonlinearDerivative, MatchesKinematics) {
  // Differentiate polar_transform along the unicycle motion.
  std::mt19937_64 rng(79);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const GoalSpec goal{Pose(u(rng), u(rng), u(rng))};
    const Pose pose(u(rng), u(rng), u(rng));
    const BodyTwist twist{u(rng), u(rng)};
    const PolarState s = polar_transform(pose, goal);
    if (s.r < 0.1 || std::abs(s.e_theta) > 3.0 || std::abs(s.theta_E) > 3.0) {
      continue;  // keep the finite difference clear of the wrap
    }
    const double h = 1e-6;
    const PolarState a = polar_transform(propagate_constant_twist(pose, twist, -h), goal);
    const PolarState b = polar_transform(propagate_constant_twist(pose, twist, h), goal);
    const PolarRate d = regulator_nonlinear_derivative(s, twist);
    ASSERT_NEAR((b.r - a.r) / (2 * h), d.r_dot, 1e-6);
    ASSERT_NEAR((b.e_theta - a.e_theta) / (2 * h), d.e_theta_dot, 1e-5);
    ASSERT_NEAR((b.theta_E - a.theta_E) / (2 * h), d.theta_E_dot, 1e-5);
  }
}

TEST(RampConfig, Validate) {
  EXPECT_NO_THROW(RampConfig{}.validate());
  EXPECT_THROW((RampConfig{0.0, 0.1, 0.1}.validate()), InvalidArgument);
  EXPECT_THROW((RampConfig{0.1, -0.1, 0.1}.validate()), InvalidArgument);
}

}  // namespace
}  // namespace diffdrive
