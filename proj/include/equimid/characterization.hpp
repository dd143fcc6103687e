#pragma once

// Inverse direction: given a candidate G, decide whether it is an
// equidistant function and recover the generating f. G qualifies when
//   (a) |grad G| < 1,
//   (b) H(x) = x - 2G grad G / (1 + |grad G|^2) is injective with regular
//       Jacobian,
//   (c) Y = 2 grad G / (1 - |grad G|^2) satisfies
//       <Y(x1) - Y(x2), H(x1) - H(x2)> >= 0.
// Then t = H(x) is the foot parameter of x and f(t) = G + sqrt(G^2 - |x-t|^2).
//
// All three conditions are global; on a finite grid they can only be
// refuted, so a pass is reported as evidence.

#include "equimid/error.hpp"
#include "equimid/general_solver.hpp"
#include "equimid/report.hpp"
#include "equimid/scalar_field.hpp"
#include "equimid/types.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace equimid {

struct CandidateG {
  ScalarField g;
  std::vector<Vector> grid;
};

namespace detail {

inline Vector candidate_gradient(const ScalarField& G, const Vector& x) {
  if (G.gradient_kind() == Derivative::None)
    throw GradientUnavailable("candidate G has no gradient: " + G.describe());
  return G.gradient(x);
}

}  // namespace detail

inline Vector h_map(const ScalarField& G, const Vector& x) {
  const Vector grad = detail::candidate_gradient(G, x);
  return x - (2.0 * G(x) / (1.0 + grad.squaredNorm())) * grad;
}

/// Throws GradientBoundViolated when |grad G(x)| >= 1.
inline Vector y_field(const ScalarField& G, const Vector& x) {
  const Vector grad = detail::candidate_gradient(G, x);
  const double q = grad.squaredNorm();
  if (!(q < 1.0)) throw GradientBoundViolated("|grad G| = " + std::to_string(std::sqrt(q)) + " >= 1");
  return (2.0 / (1.0 - q)) * grad;
}

/// Jacobian of H with column j = e_j - (d_j c) grad G - c d_j grad G, where
/// c = 2G / (1 + |grad G|^2).
inline Matrix h_jacobian(const ScalarField& G, const Vector& x) {
  const int n = G.dimension();
  const Vector grad = detail::candidate_gradient(G, x);
  const double q = grad.squaredNorm();
  const double g = G(x);
  const double c = 2.0 * g / (1.0 + q);
  Matrix J = Matrix::Identity(n, n);
  for (int j = 0; j < n; ++j) {
    const Vector dgrad = G.hess_vec(x, Vector::Unit(n, j));
    const double dc = 2.0 * grad[j] / (1.0 + q) - 4.0 * g * grad.dot(dgrad) / ((1.0 + q) * (1.0 + q));
    J.col(j) -= dc * grad + c * dgrad;
  }
  return J;
}

/// Solves H(x) = t by damped Newton from `guess`.
inline Vector invert_h(const ScalarField& G, const Vector& t, const Vector& guess, double tolerance = 1e-12,
                       int max_iterations = 100) {
  const double scale = std::max(1.0, t.norm());
  Vector x = guess;
  Vector r = h_map(G, x) - t;
  double rn = r.norm();
  for (int iter = 0; iter < max_iterations && rn > tolerance * scale; ++iter) {
    const Vector step = h_jacobian(G, x).partialPivLu().solve(-r);
    if (!step.allFinite()) break;
    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h < 50; ++h, lambda *= 0.5) {
      const Vector trial = x + lambda * step;
      const Vector rt = h_map(G, trial) - t;
      if (rt.norm() < rn) {
        x = trial;
        r = rt;
        rn = rt.norm();
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (rn > 1e3 * tolerance * scale)
    throw NoConvergence("Newton inversion of H did not converge (residual " + detail::sci(rn) + ")");
  return x;
}

struct ReconstructedSample {
  Vector x;  // grid abscissa
  Vector t;  // H(x)
  double f = 0.0;
};

/// f(t) = y + sqrt(y^2 - |x - t|^2) with x = H^{-1}(t) and y = G(x). Every
/// query reruns the inversion, seeded from the nearest tabulated foot point.
class ReconstructedField {
 public:
  ReconstructedField(ScalarField G, std::vector<ReconstructedSample> table)
      : G_(std::move(G)), table_(std::move(table)) {}

  double operator()(const Vector& t) const {
    const Vector x = invert_h(G_, t, seed(t));
    const double y = G_(x);
    const double radicand = y * y - (x - t).squaredNorm();
    if (radicand < 0.0) throw NegativeRadicand("reconstruction radicand negative");
    return y + std::sqrt(radicand);
  }

  ScalarField as_field() const {
    ReconstructedField self = *this;
    return ScalarField::builtin(G_.dimension(), [self](const Vector& t) { return self(t); }, {}, "reconstructed_f");
  }

  const std::vector<ReconstructedSample>& table() const { return table_; }

 private:
  Vector seed(const Vector& t) const {
    if (table_.empty()) return t;
    const ReconstructedSample* best = &table_.front();
    for (const auto& s : table_)
      if ((s.t - t).squaredNorm() < (best->t - t).squaredNorm()) best = &s;
    return best->x;
  }

  ScalarField G_;
  std::vector<ReconstructedSample> table_;
};

struct CharacterizationConfig {
  double image_separation = 1e-9;  // minimum distance between H images
  double min_jacobian = 1e-8;      // minimum |det H'| on the grid
  double roundtrip_tolerance = 1e-8;
  double monotone_tolerance = 1e-10;
  int cross_check_points = 5;
  double cross_check_tolerance = 1e-7;
  BisectionConfig bisection;
};

struct CharacterizationReport {
  Condition positive{"G_positive"};
  Condition gradient_bound{"grad_norm_lt_1"};
  Condition h_injective{"H_injective"};
  Condition y_monotone{"Y_monotone"};
  Condition cross_check{"bisection_reproduces_G"};
  double worst_gradient_norm = 0.0;
  double min_image_separation = std::numeric_limits<double>::infinity();
  double min_abs_jacobian = std::numeric_limits<double>::infinity();
  std::optional<std::vector<ReconstructedSample>> reconstructed;

  bool gradient_bound_ok() const { return gradient_bound.passed(); }
  bool h_injective_ok() const { return h_injective.passed(); }
  bool y_monotone_ok() const { return y_monotone.passed(); }
  bool passed() const {
    return positive.passed() && gradient_bound.passed() && h_injective.passed() && y_monotone.passed() &&
           (!cross_check.evaluated || cross_check.passed());
  }

  CheckReport as_check_report() const {
    CheckReport r{"characterization", {positive, gradient_bound, h_injective, y_monotone, cross_check}, true,
                  "conditions verified on the sample grid only"};
    return r;
  }
};

/// Runs the three characterization conditions on the candidate's grid and,
/// if they hold, tabulates the reconstructed f and re-solves G from it by
/// bisection at a few spot points.
inline CharacterizationReport characterize(const CandidateG& candidate, const CharacterizationConfig& cfg = {}) {
  const ScalarField& G = candidate.g;
  const auto& grid = candidate.grid;
  CharacterizationReport rep;

  std::vector<Vector> images;
  std::vector<Vector> ys;
  for (const Vector& x : grid) {
    const double g = G(x);
    rep.positive.record(g > 0.0 ? 0.0 : std::max(-g, std::numeric_limits<double>::min()));
    const Vector grad = detail::candidate_gradient(G, x);
    const double norm = grad.norm();
    rep.worst_gradient_norm = std::max(rep.worst_gradient_norm, norm);
    rep.gradient_bound.record(norm < 1.0 ? 0.0 : std::max(norm - 1.0, std::numeric_limits<double>::min()));
    images.push_back(h_map(G, x));
  }

  // (b) regular Jacobian of constant sign, separated images, and Newton
  // roundtrips H^{-1}(H(x)) = x started from the image itself.
  double det_sign = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double det = h_jacobian(G, grid[k]).determinant();
    rep.min_abs_jacobian = std::min(rep.min_abs_jacobian, std::abs(det));
    double excess = cfg.min_jacobian - std::abs(det);
    if (det_sign == 0.0 && std::abs(det) >= cfg.min_jacobian) det_sign = det > 0.0 ? 1.0 : -1.0;
    if (det_sign != 0.0 && det * det_sign < 0.0) excess = std::max(excess, std::abs(det));
    rep.h_injective.record(excess);

    double miss = 0.0;
    try {
      const Vector back = invert_h(G, images[k], images[k]);
      miss = (back - grid[k]).norm() - cfg.roundtrip_tolerance * std::max(1.0, grid[k].norm());
    } catch (const NoConvergence&) {
      miss = std::numeric_limits<double>::infinity();
    }
    rep.h_injective.record(miss);
  }
  for (std::size_t i = 0; i < images.size(); ++i)
    for (std::size_t j = i + 1; j < images.size(); ++j) {
      const double sep = (images[i] - images[j]).norm();
      rep.min_image_separation = std::min(rep.min_image_separation, sep);
      rep.h_injective.record(cfg.image_separation - sep);
    }
  if (rep.h_injective.violations > 0) rep.h_injective.detail = "H is not injective or has a degenerate Jacobian on the grid";

  // (c) needs Y, which exists only where |grad G| < 1.
  if (rep.gradient_bound.passed()) {
    for (const Vector& x : grid) ys.push_back(y_field(G, x));
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t j = i + 1; j < grid.size(); ++j) {
        const double scale = std::max(1.0, (ys[i] - ys[j]).norm() * (images[i] - images[j]).norm());
        rep.y_monotone.record(-(ys[i] - ys[j]).dot(images[i] - images[j]) - cfg.monotone_tolerance * scale);
      }
  } else {
    rep.y_monotone.evaluated = false;
    rep.y_monotone.detail = "skipped: |grad G| >= 1 on the grid";
  }

  rep.cross_check.evaluated = false;
  if (!(rep.positive.passed() && rep.gradient_bound.passed() && rep.h_injective.passed() && rep.y_monotone.passed()))
    return rep;

  std::vector<ReconstructedSample> table;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double y = G(grid[k]);
    const double radicand = y * y - (grid[k] - images[k]).squaredNorm();
    if (radicand < 0.0) throw NegativeRadicand("reconstruction radicand negative on the grid");
    table.push_back({grid[k], images[k], y + std::sqrt(radicand)});
  }

  rep.cross_check.evaluated = true;
  const ReconstructedField f(G, table);
  const EpigraphFocal focal(f.as_field());
  const std::size_t spots = std::min<std::size_t>(static_cast<std::size_t>(std::max(0, cfg.cross_check_points)), grid.size());
  for (std::size_t s = 0; s < spots; ++s) {
    const std::size_t k = spots == 1 ? grid.size() / 2 : s * (grid.size() - 1) / (spots - 1);
    const double solved = solve_G_at(grid[k], focal, cfg.bisection);
    rep.cross_check.record(std::abs(solved - G(grid[k])) - cfg.cross_check_tolerance);
  }
  rep.reconstructed = std::move(table);
  return rep;
}

}  // namespace equimid
