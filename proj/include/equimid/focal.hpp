#pragma once

// Distance and closest-point computations for the two focal sets: the
// hyperplane K = {(t, 0)} and the epigraph L = epi f. The epigraph search is
// a brute-force grid scan followed by coordinate-wise golden-section
// refinement, so it needs nothing from f beyond continuity; every other
// module is checked against it.

#include "equimid/error.hpp"
#include "equimid/numeric.hpp"
#include "equimid/report.hpp"
#include "equimid/scalar_field.hpp"
#include "equimid/types.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace equimid {

struct SearchBox {
  Vector lo;
  Vector hi;

  static SearchBox around(const Vector& center, double half_width) {
    return {center.array() - half_width, center.array() + half_width};
  }
  static SearchBox cube(int n, double lo, double hi) {
    return {Vector::Constant(n, lo), Vector::Constant(n, hi)};
  }

  bool contains(const Vector& t) const {
    return (t.array() >= lo.array()).all() && (t.array() <= hi.array()).all();
  }

  /// Same center, half-widths multiplied by `factor`.
  SearchBox scaled(double factor) const {
    const Vector c = 0.5 * (lo + hi);
    const Vector h = 0.5 * factor * (hi - lo);
    return {c - h, c + h};
  }
};

struct OracleConfig {
  int grid_points = 64;  // per axis
  double step_tolerance = 1e-12;
  int max_sweeps = 200;
  int max_doublings = 10;  // box expansions before giving up
};

/// The focal set L = epi f. Without an explicit box, queries search the
/// ball of radius f(base) around the query's base point, which always
/// contains the closest point of a query on or below the graph.
struct EpigraphFocal {
  ScalarField field;
  std::optional<SearchBox> box;
  OracleConfig config;

  explicit EpigraphFocal(ScalarField f, std::optional<SearchBox> b = std::nullopt, OracleConfig c = {})
      : field(std::move(f)), box(std::move(b)), config(c) {}
};

struct ClosestPointResult {
  SpacePoint point;  // on the graph of f, or the query itself if it lies in the epigraph
  double distance = 0.0;
  Vector parameter;  // t of the closest graph point
  bool interior = false;
};

inline double distance_to_hyperplane(const SpacePoint& p) { return std::abs(p.height); }

namespace detail {

inline SearchBox local_box(const SpacePoint& p, double f_at_base) {
  const double reach = std::max(f_at_base - p.height, std::abs(p.height - f_at_base));
  return SearchBox::around(p.base, 1.01 * reach + 1e-6);
}

}  // namespace detail

/// Distance from p to epi f, searching only inside `box`. Throws BoxTooSmall
/// when the minimizing parameter ends on the box boundary.
inline ClosestPointResult distance_to_epigraph(const SpacePoint& p, const ScalarField& f, const SearchBox& box,
                                               const OracleConfig& cfg = {}) {
  const int n = f.dimension();
  if (p.dimension() != n || box.lo.size() != n || box.hi.size() != n)
    throw DimensionError("query point, box and field dimensions disagree");

  const double f_base = f(p.base);
  if (p.height >= f_base) return {p, 0.0, p.base, true};

  auto objective = [&](const Vector& t) {
    const double dh = p.height - f(t);
    return (p.base - t).squaredNorm() + dh * dh;
  };

  // Grid scan in lexicographic order; strict improvement keeps the
  // lexicographically smallest minimizer on ties.
  const int m = std::max(2, cfg.grid_points);
  const Vector spacing = (box.hi - box.lo) / static_cast<double>(m - 1);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  Vector t(n);
  Vector best_t(n);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    for (int i = 0; i < n; ++i) t[i] = idx[i] == m - 1 ? box.hi[i] : box.lo[i] + idx[i] * spacing[i];
    const double v = objective(t);
    if (v < best) {
      best = v;
      best_t = t;
    }
    int axis = n - 1;
    while (axis >= 0 && ++idx[axis] == m) idx[axis--] = 0;
    if (axis < 0) break;
  }

  // Coordinate descent with golden-section line searches. Each axis keeps
  // its own bracket half-width: it grows when the search ends on the
  // bracket edge and shrinks to track the last move otherwise.
  Vector half = spacing;
  Vector probe = best_t;
  for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    double max_move = 0.0;
    const double before = best;
    for (int i = 0; i < n; ++i) {
      const double lo = std::max(box.lo[i], probe[i] - half[i]);
      const double hi = std::min(box.hi[i], probe[i] + half[i]);
      const double origin = probe[i];
      auto along = [&](double s) {
        probe[i] = s;
        return objective(probe);
      };
      const auto r = numeric::golden_section(along, lo, hi, cfg.step_tolerance);
      double move = 0.0;
      if (r.value < best) {
        move = std::abs(r.at - origin);
        probe[i] = r.at;
        best = r.value;
      } else {
        probe[i] = origin;
      }
      const double width = hi - lo;
      const bool on_edge = move > 0.0 && (std::abs(probe[i] - lo) < 1e-3 * width || std::abs(hi - probe[i]) < 1e-3 * width);
      half[i] = on_edge ? 2.0 * half[i] : std::max(4.0 * move, 16.0 * cfg.step_tolerance);
      max_move = std::max(max_move, move);
    }
    if (n == 1 && sweep >= 1 && max_move < 1e-3 * spacing[0]) break;
    if (max_move < cfg.step_tolerance) break;
    if (before - best <= 4.0 * std::numeric_limits<double>::epsilon() * best && sweep > 0) break;
  }

  for (int i = 0; i < n; ++i) {
    const double slack = 1e-9 * std::max(1.0, box.hi[i] - box.lo[i]);
    if (probe[i] - box.lo[i] < slack || box.hi[i] - probe[i] < slack)
      throw BoxTooSmall("closest point parameter reached the search box boundary on axis " + std::to_string(i + 1));
  }
  return {SpacePoint(probe, f(probe)), std::sqrt(best), probe, false};
}

/// Distance from p to the focal epigraph, expanding an explicit box by
/// doubling until the minimizer is interior (up to config.max_doublings).
inline ClosestPointResult distance_to_epigraph(const SpacePoint& p, const EpigraphFocal& L) {
  if (!L.box) {
    const double fb = L.field(p.base);
    if (p.height >= fb) return {p, 0.0, p.base, true};
    return distance_to_epigraph(p, L.field, detail::local_box(p, fb), L.config);
  }
  SearchBox box = *L.box;
  for (int k = 0;; ++k) {
    try {
      return distance_to_epigraph(p, L.field, box, L.config);
    } catch (const BoxTooSmall&) {
      if (k >= L.config.max_doublings) throw;
      box = box.scaled(2.0);
    }
  }
}

/// Checks the 1-Lipschitz bound |d(p2, L) - d(p1, L)| <= |p2 - p1| on each
/// pair, allowing `tolerance` relative slack.
inline CheckReport lipschitz_check(const EpigraphFocal& L, std::span<const std::pair<SpacePoint, SpacePoint>> pairs,
                                   double tolerance = 1e-9) {
  CheckReport report{"lipschitz", {}, true, ""};
  Condition c{"one_lipschitz"};
  for (const auto& [a, b] : pairs) {
    const double da = distance_to_epigraph(a, L).distance;
    const double db = distance_to_epigraph(b, L).distance;
    const double gap = distance(a, b);
    c.record(std::abs(db - da) - gap - tolerance * std::max(1.0, gap));
  }
  report.conditions.push_back(c);
  return report;
}

}  // namespace equimid
