#pragma once

// Closed-form equidistant function of the hyperboloid f(t) = sqrt(|t|^2 + 1).
//
// Inverting x(t) = t + t sqrt(t^2+1) / (sqrt(t^2+1) + sqrt(2t^2+1)) reduces
// to the depressed cubic t^3 - (s^2 - 3)/2 t - s = 0. Cardano's formula
// gives the single real root for |s| <= x2; beyond that the cubic has three
// real roots and the one with the sign of s comes from the trigonometric
// form. The n-dimensional inverse is radial.

#include "equimid/scalar_field.hpp"
#include "equimid/types.hpp"

#include <cmath>

namespace equimid::hyperboloid {

/// x2 = sqrt(3) sqrt(cbrt(4) + cbrt(2) + 1); the discriminant
/// s^2/4 - (s^2 - 3)^3/216 changes sign at s = +-x2.
inline const double kBreakpoint = std::sqrt(3.0) * std::sqrt(std::cbrt(4.0) + std::cbrt(2.0) + 1.0);

inline double discriminant(double s) {
  const double a = s * s - 3.0;
  return s * s / 4.0 - a * a * a / 216.0;
}

/// t^3 - (s^2 - 3)/2 t - s.
inline double cubic_residual(double s, double t) { return t * t * t - 0.5 * (s * s - 3.0) * t - s; }

/// Cardano branch; exact for x1 <= s <= x2. Uses the real, sign-preserving
/// cube root. Rounding-level negative discriminants near the breakpoint are
/// clamped to zero. The second cube root is recovered from u v = (s^2 - 3)/6
/// since 0.5 s - sign(s) sqrt(D) cancels near |s| = sqrt(3).
inline double cardano_root(double s) {
  if (s == 0.0) return 0.0;
  const double root = std::sqrt(std::max(0.0, discriminant(s)));
  const double u = std::cbrt(0.5 * s + (s < 0.0 ? -root : root));
  return u + (s * s - 3.0) / (6.0 * u);
}

/// Trigonometric branch; the root with the sign of s when |s| >= x2.
inline double trigonometric_root(double s) {
  const double a = s * s - 3.0;
  const double radicand = std::max(0.0, a * a * a / (54.0 * s * s) - 1.0);
  const double magnitude = 2.0 * std::sqrt(a / 6.0) * std::cos(std::atan(std::sqrt(radicand)) / 3.0);
  return s < 0.0 ? -magnitude : magnitude;
}

/// x^{-1}(s) for n = 1.
inline double x_inverse_1d(double s) {
  if (s < -kBreakpoint || s > kBreakpoint) return trigonometric_root(s);
  return cardano_root(s);
}

/// x^{-1}(s) for any n: the 1-D inverse of |s| along s / |s|.
inline Vector x_inverse_nd(const Vector& s) {
  const double r = s.norm();
  if (r == 0.0) return Vector::Zero(s.size());
  return (x_inverse_1d(r) / r) * s;
}

/// Forward map x(t) and height y(t) written out for this f.
inline double forward_x_1d(double t) {
  const double a = std::sqrt(t * t + 1.0);
  const double b = std::sqrt(2.0 * t * t + 1.0);
  return t + t * a / (a + b);
}

/// y as a function of |t|.
inline double height(double t_norm) {
  const double a = std::sqrt(t_norm * t_norm + 1.0);
  const double b = std::sqrt(2.0 * t_norm * t_norm + 1.0);
  return a * b / (a + b);
}

inline double golden_G(double s) { return height(x_inverse_1d(s)); }

inline double golden_G(const Vector& s) { return height(x_inverse_nd(s).norm()); }

/// The generating field sqrt(|t|^2 + 1) in the expression language.
inline ScalarField generator(int n) { return ScalarField::parse("sqrt(norm2() + 1)", n); }

/// golden_G as a field. Its gradient is left to finite differences so that
/// checks built on it stay independent of the parameterization formulas.
inline ScalarField golden_field(int n) {
  return ScalarField::builtin(n, [](const Vector& s) { return golden_G(s); }, {}, "golden_G");
}

}  // namespace equimid::hyperboloid
