#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <utility>

namespace equimid {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A point (t, y) of R^{n+1}: `base` holds the first n coordinates and
/// `height` the last one.
struct SpacePoint {
  Vector base;
  double height = 0.0;

  SpacePoint() = default;
  SpacePoint(Vector b, double h) : base(std::move(b)), height(h) {}

  Eigen::Index dimension() const { return base.size(); }
};

inline double distance(const SpacePoint& a, const SpacePoint& b) {
  const double dh = a.height - b.height;
  return std::sqrt((a.base - b.base).squaredNorm() + dh * dh);
}

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace equimid
