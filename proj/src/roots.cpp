#include "diffdrive/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

namespace diffdrive {

std::complex<double> MonicCubic::operator()(std::complex<double> s) const {
  return ((s + a2) * s + a1) * s + a0;
}

double MonicCubic::magnitude_scale(std::complex<double> s) const {
  const double m = std::abs(s);
  return ((m + std::abs(a2)) * m + std::abs(a1)) * m + std::abs(a0);
}

MonicCubic characteristic_polynomial(const Matrix3& a) {
  const double trace = a.trace();
  const double minors = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) +
                        a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0) +
                        a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  return {-trace, minors, -a.determinant()};
}

namespace {

double eval(const MonicCubic& p, double s) {
  return ((s + p.a2) * s + p.a1) * s + p.a0;
}

double eval_derivative(const MonicCubic& p, double s) {
  return (3.0 * s + 2.0 * p.a2) * s + p.a1;
}

// A real root of odd multiplicity. p(-bound) < 0 < p(bound) by the Cauchy
// bound, so the bracket always holds a sign change. Plain bisection keeps
// that sign change, which steers away from even-multiplicity roots where
// Newton would stall at sqrt(eps) accuracy.
double bracketed_real_root(const MonicCubic& p) {
  const double bound =
      1.0 + std::max({std::abs(p.a2), std::abs(p.a1), std::abs(p.a0)});
  double lo = -bound;
  double hi = bound;
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;
    }
    const double value = eval(p, mid);
    if (value == 0.0) {
      return mid;
    }
    (value < 0.0 ? lo : hi) = mid;
  }
  return std::abs(eval(p, lo)) <= std::abs(eval(p, hi)) ? lo : hi;
}

// Newton polish on the full cubic, accepted only while the residual shrinks.
double polish(const MonicCubic& p, double s) {
  double best = std::abs(eval(p, s));
  for (int iter = 0; iter < 8 && best > 0.0; ++iter) {
    const double slope = eval_derivative(p, s);
    if (slope == 0.0) {
      break;
    }
    const double next = s - eval(p, s) / slope;
    const double residual = std::abs(eval(p, next));
    if (!(residual < best)) {
      break;
    }
    s = next;
    best = residual;
  }
  return s;
}

}  // namespace

Roots3 cubic_roots(const MonicCubic& cubic) {
  const double first = bracketed_real_root(cubic);

  // s^3 + a2 s^2 + a1 s + a0 = (s - first)(s^2 + b s + c)
  const double b = cubic.a2 + first;
  const double c = cubic.a1 + first * b;

  Roots3 roots;
  roots[0] = first;
  const double disc = b * b - 4.0 * c;
  if (disc >= 0.0) {
    const double sqrt_disc = std::sqrt(disc);
    const double q = -0.5 * (b + std::copysign(sqrt_disc, b));
    const double r1 = q;
    const double r2 = q != 0.0 ? c / q : 0.0;
    roots[1] = disc > 0.0 ? polish(cubic, r1) : r1;
    roots[2] = disc > 0.0 ? polish(cubic, r2) : r2;
  } else {
    const double re = -0.5 * b;
    const double im = 0.5 * std::sqrt(-disc);
    roots[1] = {re, -im};
    roots[2] = {re, im};
  }

  for (auto& root : roots) {
    root = {root.real() + 0.0, root.imag() + 0.0};  // no signed zeros
  }
  std::sort(roots.begin(), roots.end(),
            [](const std::complex<double>& l, const std::complex<double>& r) {
              if (l.real() != r.real()) {
                return l.real() < r.real();
              }
              return l.imag() < r.imag();
            });
  return roots;
}

Roots3 characteristic_roots(const Matrix3& matrix) {
  return cubic_roots(characteristic_polynomial(matrix));
}

}  // namespace diffdrive
