#include "diffdrive/trajectory.hpp"

#include <cmath>
#include <string>

#include "diffdrive/errors.hpp"

namespace diffdrive {

void ReferenceProfile::validate() const {
  if (segments.empty()) {
    throw InvalidArgument("reference profile needs at least one segment");
  }
  if (!initial_pose.is_finite()) {
    throw InvalidArgument("reference profile initial pose must be finite");
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const ReferenceSegment& seg = segments[i];
    if (!(std::isfinite(seg.duration) && seg.duration > 0.0)) {
      throw InvalidArgument("segment " + std::to_string(i) +
                            ": duration must be positive");
    }
    if (!std::isfinite(seg.v_ref) || !std::isfinite(seg.omega_ref)) {
      throw InvalidArgument("segment " + std::to_string(i) +
                            ": commands must be finite");
    }
  }
}

double ReferenceProfile::total_duration() const {
  double total = 0.0;
  for (const ReferenceSegment& seg : segments) {
    total += seg.duration;
  }
  return total;
}

ReferenceState reference_at(const ReferenceProfile& profile, double t) {
  if (!(t >= 0.0)) {
    throw InvalidArgument("reference_at: t must be non-negative");
  }
  Pose pose = profile.initial_pose;
  double start = 0.0;
  for (const ReferenceSegment& seg : profile.segments) {
    const BodyTwist twist{seg.v_ref, seg.omega_ref};
    if (t < start + seg.duration) {
      return {propagate_constant_twist(pose, twist, t - start), seg.v_ref,
              seg.omega_ref};
    }
    pose = propagate_constant_twist(pose, twist, seg.duration);
    start += seg.duration;
  }
  return {pose, 0.0, 0.0};
}

ReferenceProfile make_line_profile(const Pose& start, double v, double duration) {
  ReferenceProfile profile{start, {{v, 0.0, duration}}};
  profile.validate();
  return profile;
}

ReferenceProfile make_circle_profile(const Pose& start, double v, double omega,
                                     double duration) {
  ReferenceProfile profile{start, {{v, omega, duration}}};
  profile.validate();
  return profile;
}

ReferenceProfile make_s_curve_profile(const Pose& start, double v, double omega,
                                      double duration) {
  ReferenceProfile profile{
      start, {{v, omega, duration / 2.0}, {v, -omega, duration / 2.0}}};
  profile.validate();
  return profile;
}

ReferenceProfile make_named_profile(std::string_view name, const Pose& start,
                                    double v, double omega, double duration) {
  if (name == "line") {
    return make_line_profile(start, v, duration);
  }
  if (name == "circle") {
    return make_circle_profile(start, v, omega, duration);
  }
  if (name == "s-curve") {
    return make_s_curve_profile(start, v, omega, duration);
  }
  throw InvalidArgument("unknown profile preset '" + std::string(name) +
                        "' (expected line, circle or s-curve)");
}

}  // namespace diffdrive
