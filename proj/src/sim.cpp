#include "diffdrive/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <utility>

#include "diffdrive/errors.hpp"

namespace diffdrive {

namespace {

constexpr double kDivergenceLimit = 1e6;  // m

bool finite_gains(const RegulatorGains& g) {
  return std::isfinite(g.k_r) && std::isfinite(g.k_etheta) &&
         std::isfinite(g.k_thetaE);
}

bool finite_gains(const TrackingGains& g) {
  return std::isfinite(g.k1) && std::isfinite(g.k2) && std::isfinite(g.k3);
}

bool escaped(const Pose& pose) {
  return !pose.is_finite() || std::abs(pose.x) > kDivergenceLimit ||
         std::abs(pose.y) > kDivergenceLimit;
}

// Number of whole periods needed to cover `span`, tolerant to the rounding in
// quotients such as 0.03 / 0.001.
std::size_t periods_covering(double span, double period) {
  return static_cast<std::size_t>(std::ceil(span / period - 1e-9));
}

}  // namespace

void ScenarioConfig::validate() const {
  geometry.validate();
  calibration.validate();
  if (!initial_pose.is_finite()) {
    throw InvalidArgument("initial_pose must be finite");
  }
  if (!(std::isfinite(control_period) && control_period > 0.0)) {
    throw InvalidArgument("control_period must be positive");
  }
  if (!(std::isfinite(plant_substep) && plant_substep > 0.0 &&
        plant_substep <= control_period * (1.0 + 1e-12))) {
    throw InvalidArgument("plant_substep must be positive and <= control_period");
  }
  if (!(std::isfinite(max_time) && max_time > 0.0)) {
    throw InvalidArgument("max_time must be positive");
  }
  if (mode == ScenarioMode::kRegulation) {
    if (!regulation.goal.goal_pose.is_finite()) {
      throw InvalidArgument("goal must be finite");
    }
    if (!finite_gains(regulation.gains)) {
      throw InvalidArgument("regulator gains must be finite");
    }
    regulation.ramp.validate();
    if (!(std::isfinite(regulation.r_stop) && regulation.r_stop >= 0.0)) {
      throw InvalidArgument("r_stop must be non-negative");
    }
    if (!(std::isfinite(regulation.theta_stop) && regulation.theta_stop > 0.0)) {
      throw InvalidArgument("theta_stop must be positive");
    }
    return;
  }
  tracking.profile.validate();
  if (!(std::isfinite(tracking.epsilon_v) && tracking.epsilon_v > 0.0)) {
    throw InvalidArgument("epsilon_v must be positive");
  }
  if (tracking.design) {
    tracking.design->validate();
    for (const ReferenceSegment& seg : tracking.profile.segments) {
      design_gains(*tracking.design, seg.v_ref, seg.omega_ref, tracking.epsilon_v);
    }
  } else if (tracking.gains) {
    if (!finite_gains(*tracking.gains)) {
      throw InvalidArgument("tracking gains must be finite");
    }
  } else {
    throw InvalidArgument("tracking needs either a gain design or explicit gains");
  }
}

Simulator::Simulator(ScenarioConfig config) : config_(std::move(config)) {
  config_.validate();
  substeps_ = static_cast<int>(
      std::max<std::size_t>(1, periods_covering(config_.control_period,
                                                config_.plant_substep)));
  max_steps_ = std::max<std::size_t>(
      1, periods_covering(config_.max_time, config_.control_period));
  true_pose_ = config_.initial_pose;
  odometry_.pose_estimate = config_.initial_pose;
  records_.reserve(std::min<std::size_t>(max_steps_, 1u << 20));
}

double Simulator::time() const {
  return std::min(static_cast<double>(step_index_) * config_.control_period,
                  config_.max_time);
}

bool Simulator::finished() const {
  return converged_ || diverged_ || step_index_ >= max_steps_;
}

void Simulator::measure() {
  encoder_l_ = encoder_update(encoder_l_, wheel_angle_l_);
  encoder_r_ = encoder_update(encoder_r_, wheel_angle_r_);
  odometry_ = odometry_update(odometry_, encoder_l_.ticks, encoder_r_.ticks,
                              config_.geometry);
}

Simulator::Decision Simulator::decide(double t, const Pose& feedback) {
  return config_.mode == ScenarioMode::kRegulation
             ? decide_regulation(t, feedback)
             : decide_tracking(t, feedback);
}

Simulator::Decision Simulator::decide_regulation(double t, const Pose& feedback) {
  const RegulationSettings& reg = config_.regulation;
  const PolarState polar = polar_transform(
      feedback, reg.goal, {HeadingConvention::kYAxis, reg.r_stop});
  const double distance = std::hypot(reg.goal.goal_pose.x - feedback.x,
                                     reg.goal.goal_pose.y - feedback.y);
  if (distance < reg.r_stop) {
    const double heading_error =
        std::abs(wrap_angle(feedback.theta - reg.goal.goal_pose.theta));
    if (heading_error < reg.theta_stop) {
      converged_ = true;
    }
    return {polar, BodyTwist{}};
  }
  const RegulatorGains gains =
      config_.features.ramp_enabled
          ? effective_gains(reg.gains, reg.ramp, t, polar.r)
          : reg.gains;
  return {polar, regulator_control(polar, gains)};
}

Simulator::Decision Simulator::decide_tracking(double t, const Pose& feedback) {
  const TrackingSettings& trk = config_.tracking;
  const ReferenceState ref = reference_at(trk.profile, t);
  const TrackingError err = tracking_error(feedback, ref);
  TrackingGains gains;
  if (trk.design) {
    // Past the end of the profile v_ref is zero and the design is singular;
    // keep the gains of the last active segment.
    if (std::abs(ref.v_ref) >= trk.epsilon_v) {
      last_tracking_gains_ =
          design_gains(*trk.design, ref.v_ref, ref.omega_ref, trk.epsilon_v).gains;
    }
    gains = last_tracking_gains_.value_or(TrackingGains{});
  } else {
    gains = *trk.gains;
  }
  return {err, tracking_control(err, ref, gains)};
}

const StepRecord& Simulator::step() {
  if (finished()) {
    throw InvalidArgument("simulation already finished");
  }
  measure();
  const Pose& feedback =
      config_.features.use_odometry ? odometry_.pose_estimate : true_pose_;
  const Decision decision = decide(time(), feedback);
  return actuate(time(), decision.error_state, decision.command);
}

const StepRecord& Simulator::apply_command(const BodyTwist& command) {
  if (finished()) {
    throw InvalidArgument("simulation already finished");
  }
  measure();
  const Pose& feedback =
      config_.features.use_odometry ? odometry_.pose_estimate : true_pose_;
  const bool was_converged = converged_;
  const Decision decision = decide(time(), feedback);
  converged_ = was_converged;
  return actuate(time(), decision.error_state, command);
}

const StepRecord& Simulator::actuate(double t, const ErrorState& error_state,
                                     const BodyTwist& command) {
  const WheelSpeeds wheels = twist_to_wheels(command, config_.geometry);
  const PowerCommand power_l = wheel_speed_to_power(wheels.omega_l, config_.calibration);
  const PowerCommand power_r = wheel_speed_to_power(wheels.omega_r, config_.calibration);

  StepRecord& rec = records_.emplace_back();
  rec.t = t;
  rec.pose_true = true_pose_;
  rec.pose_odo = odometry_.pose_estimate;
  rec.error_state = error_state;
  rec.command = command;
  rec.wheel_cmds = wheels;
  rec.power_l = power_l;
  rec.power_r = power_r;
  rec.saturated = power_l.saturated || power_r.saturated;

  ++step_index_;
  if (!std::isfinite(power_l.raw) || !std::isfinite(power_r.raw) ||
      escaped(odometry_.pose_estimate)) {
    diverged_ = true;
    return rec;
  }

  const bool clamp = config_.features.clamp_power;
  const WheelSpeeds applied{
      unclamped_power_to_wheel_speed(clamp ? power_l.value : power_l.raw,
                                     config_.calibration),
      unclamped_power_to_wheel_speed(clamp ? power_r.value : power_r.raw,
                                     config_.calibration)};
  // The last period is shortened so a run ends exactly at max_time.
  const double period = std::min(config_.control_period, config_.max_time - t);
  if (!(period > 0.0)) {
    return rec;
  }
  const int substeps =
      period < config_.control_period
          ? static_cast<int>(std::max<std::size_t>(
                1, periods_covering(period, config_.plant_substep)))
          : substeps_;
  true_pose_ = integrate_pose(true_pose_, wheels_to_twist(applied, config_.geometry),
                              period, substeps);
  wheel_angle_l_ += applied.omega_l * period;
  wheel_angle_r_ += applied.omega_r * period;
  if (escaped(true_pose_) || !std::isfinite(wheel_angle_l_) ||
      !std::isfinite(wheel_angle_r_)) {
    diverged_ = true;
  }
  return rec;
}

SimSummary Simulator::summarize(double wall_time_s) const {
  SimSummary s;
  s.final_time = time();
  s.final_pose_true = true_pose_;
  s.final_pose_odo = odometry_.pose_estimate;
  s.converged = converged_;
  s.diverged = diverged_;
  s.wall_time_s = wall_time_s;

  double sum_sq = 0.0;
  if (config_.mode == ScenarioMode::kTracking) {
    const ReferenceProfile& profile = config_.tracking.profile;
    for (const StepRecord& rec : records_) {
      const double e = tracking_error(rec.pose_true, reference_at(profile, rec.t)).norm();
      sum_sq += e * e;
    }
    s.initial_error_norm =
        tracking_error(config_.initial_pose, reference_at(profile, 0.0)).norm();
    s.final_error_norm =
        tracking_error(true_pose_, reference_at(profile, s.final_time)).norm();
  } else {
    const Pose& goal = config_.regulation.goal.goal_pose;
    for (const StepRecord& rec : records_) {
      const double e = std::hypot(goal.x - rec.pose_true.x, goal.y - rec.pose_true.y);
      sum_sq += e * e;
    }
    s.initial_error_norm = std::hypot(goal.x - config_.initial_pose.x,
                                      goal.y - config_.initial_pose.y);
    s.final_error_norm = std::hypot(goal.x - true_pose_.x, goal.y - true_pose_.y);
    s.final_heading_error = std::abs(wrap_angle(true_pose_.theta - goal.theta));
  }
  if (!records_.empty()) {
    s.rms_error_norm = std::sqrt(sum_sq / static_cast<double>(records_.size()));
  }
  for (const StepRecord& rec : records_) {
    s.peak_power = std::max({s.peak_power, std::abs(rec.power_l.value),
                             std::abs(rec.power_r.value)});
    s.peak_raw_power = std::max({s.peak_raw_power, std::abs(rec.power_l.raw),
                                 std::abs(rec.power_r.raw)});
    if (rec.saturated) {
      ++s.saturation_count;
    }
  }
  return s;
}

SimTrace Simulator::run() {
  const auto start = std::chrono::steady_clock::now();
  while (!finished()) {
    step();
  }
  if (!diverged_) {
    measure();
  }
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - start;
  return {config_, records_, summarize(elapsed.count())};
}

SimTrace run_regulation(const ScenarioConfig& config) {
  if (config.mode != ScenarioMode::kRegulation) {
    throw InvalidArgument("run_regulation needs a regulation scenario");
  }
  return Simulator(config).run();
}

SimTrace run_tracking(const ScenarioConfig& config) {
  if (config.mode != ScenarioMode::kTracking) {
    throw InvalidArgument("run_tracking needs a tracking scenario");
  }
  return Simulator(config).run();
}

SimTrace run_scenario(const ScenarioConfig& config) {
  return config.mode == ScenarioMode::kRegulation ? run_regulation(config)
                                                  : run_tracking(config);
}

}  // namespace diffdrive
