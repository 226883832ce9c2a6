#pragma once

// Trajectory tracking: pose error in the robot frame, the feedback law on
// top of reference feedforward, and gain design by pole placement.
//
// The closed-loop linearization used here is
//
//       [ -k1        w_ref        0   ]
//   A = [ -w_ref     0            v_ref ]
//       [  0   -k2 sgn(v_ref)    -k3  ]
//
// and with k1 = k3 its characteristic polynomial factors as
// (s + k1)(s^2 + k1 s + k2 |v_ref| + w_ref^2). design_gains() picks the
// gains that match (s + 2 xi wn)(s^2 + 2 xi wn s + wn^2).

#include "diffdrive/kinematics.hpp"
#include "diffdrive/roots.hpp"
#include "diffdrive/trajectory.hpp"

namespace diffdrive {

/// Reference minus pose, rotated into the robot frame: e1 along the
/// heading, e2 to the left, e3 heading error in (-pi, pi].
struct TrackingError {
  double e1 = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;

  double norm() const;
};

struct TrackingGains {
  double k1 = 0.0;  // 1/s
  double k2 = 0.0;  // 1/(m s)
  double k3 = 0.0;  // 1/s
};

struct TrackingDesignSpec {
  double xi = 1.0;       // damping factor
  double omega_n = 1.0;  // natural frequency, rad/s

  void validate() const;
};

struct GainDesign {
  TrackingGains gains;
  /// Set when omega_n <= |omega_ref|, which makes k2 <= 0 and leaves the
  /// intended damped form.
  bool outside_damped_form = false;
};

inline constexpr double kDefaultEpsilonV = 1e-3;  // m/s

/// -1, 0 or +1.
double sgn(double value);

TrackingError tracking_error(const Pose& pose, const ReferenceState& ref);

/// k1 = k3 = 2 xi wn, k2 = (wn^2 - w_ref^2) / |v_ref|.
/// Throws ReferenceTooSlow when |v_ref| < epsilon_v.
GainDesign design_gains(const TrackingDesignSpec& spec, double v_ref,
                        double omega_ref, double epsilon_v = kDefaultEpsilonV);

/// v = v_ref cos(e3) + k1 e1,  omega = w_ref + k2 sgn(v_ref) e2 + k3 e3.
BodyTwist tracking_control(const TrackingError& err, const ReferenceState& ref,
                           const TrackingGains& gains);

Matrix3 tracking_closed_loop_matrix(const TrackingGains& gains, double v_ref,
                                    double omega_ref);

}  // namespace diffdrive
