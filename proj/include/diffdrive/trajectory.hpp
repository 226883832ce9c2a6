#pragma once

#include <string_view>
#include <vector>

#include "diffdrive/kinematics.hpp"

namespace diffdrive {

/// Reference robot state at one instant: pose plus the feedforward commands
/// that generate it.
struct ReferenceState {
  Pose pose;
  double v_ref = 0.0;      // m/s
  double omega_ref = 0.0;  // rad/s
};

/// One piece of a piecewise-constant reference: constant commands held for
/// `duration` seconds.
struct ReferenceSegment {
  double v_ref = 0.0;
  double omega_ref = 0.0;
  double duration = 0.0;
};

struct ReferenceProfile {
  Pose initial_pose;
  std::vector<ReferenceSegment> segments;

  /// Throws InvalidArgument for an empty profile, a non-positive duration or
  /// a non-finite command.
  void validate() const;
  double total_duration() const;
};

/// Closed-form reference at time t >= 0. Segment k covers
/// [start_k, start_k + duration_k); for t at or beyond the end of the last
/// segment the final pose is held with zero commands.
ReferenceState reference_at(const ReferenceProfile& profile, double t);

ReferenceProfile make_line_profile(const Pose& start, double v, double duration);
ReferenceProfile make_circle_profile(const Pose& start, double v, double omega,
                                     double duration);
/// Two arcs of opposite curvature, each lasting duration / 2.
ReferenceProfile make_s_curve_profile(const Pose& start, double v, double omega,
                                      double duration);

/// Looks up a built-in profile by name: "line", "circle" or "s-curve".
/// Throws InvalidArgument for other names.
ReferenceProfile make_named_profile(std::string_view name, const Pose& start,
                                    double v, double omega, double duration);

}  // namespace diffdrive
