#include "diffdrive/tracking.hpp"

#include <cmath>

#include "diffdrive/errors.hpp"

namespace diffdrive {

double TrackingError::norm() const {
  return std::sqrt(e1 * e1 + e2 * e2 + e3 * e3);
}

void TrackingDesignSpec::validate() const {
  if (!(std::isfinite(xi) && xi > 0.0)) {
    throw InvalidArgument("damping factor xi must be positive");
  }
  if (!(std::isfinite(omega_n) && omega_n > 0.0)) {
    throw InvalidArgument("natural frequency omega_n must be positive");
  }
}

double sgn(double value) {
  return static_cast<double>((0.0 < value) - (value < 0.0));
}

TrackingError tracking_error(const Pose& pose, const ReferenceState& ref) {
  const double dx = ref.pose.x - pose.x;
  const double dy = ref.pose.y - pose.y;
  const double s = std::sin(pose.theta);
  const double c = std::cos(pose.theta);
  return {-s * dx + c * dy, -c * dx - s * dy,
          wrap_angle(ref.pose.theta - pose.theta)};
}

GainDesign design_gains(const TrackingDesignSpec& spec, double v_ref,
                        double omega_ref, double epsilon_v) {
  spec.validate();
  if (!(epsilon_v > 0.0)) {
    throw InvalidArgument("epsilon_v must be positive");
  }
  if (!(std::abs(v_ref) >= epsilon_v)) {
    throw ReferenceTooSlow(v_ref, epsilon_v);
  }
  const double k = 2.0 * spec.xi * spec.omega_n;
  const double k2 =
      (spec.omega_n * spec.omega_n - omega_ref * omega_ref) / std::abs(v_ref);
  return {{k, k2, k}, spec.omega_n <= std::abs(omega_ref)};
}

BodyTwist tracking_control(const TrackingError& err, const ReferenceState& ref,
                           const TrackingGains& gains) {
  const double u1 = -gains.k1 * err.e1;
  const double u2 = -gains.k2 * sgn(ref.v_ref) * err.e2 - gains.k3 * err.e3;
  return {ref.v_ref * std::cos(err.e3) - u1, ref.omega_ref - u2};
}

Matrix3 tracking_closed_loop_matrix(const TrackingGains& gains, double v_ref,
                                    double omega_ref) {
  Matrix3 a;
  // clang-format off
  a << -gains.k1,  omega_ref,                  0.0,
       -omega_ref, 0.0,                        v_ref,
        0.0,       -gains.k2 * sgn(v_ref),    -gains.k3;
  // clang-format on
  return a;
}

}  // namespace diffdrive
