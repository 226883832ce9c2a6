#pragma once

#include <array>
#include <complex>

#include <Eigen/Core>

namespace diffdrive {

using Matrix3 = Eigen::Matrix3d;
using Roots3 = std::array<std::complex<double>, 3>;

/// Monic cubic s^3 + a2 s^2 + a1 s + a0.
struct MonicCubic {
  double a2 = 0.0;
  double a1 = 0.0;
  double a0 = 0.0;

  std::complex<double> operator()(std::complex<double> s) const;
  /// Sum of |a_i| |s|^i with a3 = 1; the natural scale for a residual.
  double magnitude_scale(std::complex<double> s) const;
};

/// det(sI - A), expanded from the trace, principal minors and determinant.
MonicCubic characteristic_polynomial(const Matrix3& matrix);

/// Roots of a real monic cubic, sorted by real part then imaginary part.
///
/// A root of odd multiplicity is bracketed and refined by safeguarded Newton
/// iteration; the remaining quadratic factor is solved in closed form.
Roots3 cubic_roots(const MonicCubic& cubic);

/// Eigenvalues of a 3x3 real matrix as roots of its characteristic
/// polynomial.
Roots3 characteristic_roots(const Matrix3& matrix);

}  // namespace diffdrive
