#pragma once

// Small numerical helpers shared by the solvers: finite differences and a
// golden-section line minimizer.

#include "equimid/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace equimid::numeric {

/// Step for first-order central differences, scaled to the magnitude of x.
inline double central_step(double x) { return std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(x)); }

/// Step for the fourth-order gradient stencil.
inline double stencil_step(double x) { return std::pow(std::numeric_limits<double>::epsilon(), 0.2) * std::max(1.0, std::abs(x)); }

/// Gradient of a scalar function by the five-point central stencil.
template <typename Fn>
Vector fd_gradient(const Fn& fn, const Vector& t) {
  Vector g(t.size());
  Vector probe = t;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double h = stencil_step(t[i]);
    double f[4];
    const double offsets[4] = {2.0, 1.0, -1.0, -2.0};
    for (int k = 0; k < 4; ++k) {
      probe[i] = t[i] + offsets[k] * h;
      f[k] = fn(probe);
    }
    probe[i] = t[i];
    g[i] = (-f[0] + 8.0 * f[1] - 8.0 * f[2] + f[3]) / (12.0 * h);
  }
  return g;
}

/// Central-difference Jacobian of a map R^n -> R^m; column j is d map / d t_j.
template <typename Map>
Matrix fd_jacobian(const Map& map, const Vector& t, double relative_step = 0.0) {
  Vector probe = t;
  Matrix J;
  for (Eigen::Index j = 0; j < t.size(); ++j) {
    const double h = relative_step > 0.0 ? relative_step * std::max(1.0, std::abs(t[j])) : central_step(t[j]);
    probe[j] = t[j] + h;
    const Vector up = map(probe);
    probe[j] = t[j] - h;
    const Vector down = map(probe);
    probe[j] = t[j];
    if (j == 0) J.resize(up.size(), t.size());
    J.col(j) = (up - down) / (2.0 * h);
  }
  return J;
}

/// Directional derivative of a vector map along v by central differences,
/// with step h = rel * max(1, |t|) in the parameter of the line t + s v/|v|.
template <typename Map>
Vector fd_directional(const Map& map, const Vector& t, const Vector& v, double rel = 1e-6) {
  const double vn = v.norm();
  if (vn == 0.0) return Vector::Zero(map(t).size());
  const double h = rel * std::max(1.0, t.norm()) / vn;
  return (map(t + h * v) - map(t - h * v)) / (2.0 * h);
}

struct LineMinimum {
  double at = 0.0;
  double value = 0.0;
};

/// Golden-section search for a minimum of fn on [lo, hi]. Stops when the
/// bracket is narrower than `tol`.
template <typename Fn>
LineMinimum golden_section(const Fn& fn, double lo, double hi, double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  for (int iter = 0; iter < 200 && (b - a) > tol; ++iter) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = fn(d);
    }
  }
  LineMinimum best{c, fc};
  if (fd < best.value) best = {d, fd};
  // The endpoints are candidates too, so a minimum on the boundary is found.
  const double fa = fn(a);
  const double fb = fn(b);
  if (fa < best.value) best = {a, fa};
  if (fb < best.value) best = {b, fb};
  return best;
}

}  // namespace equimid::numeric
