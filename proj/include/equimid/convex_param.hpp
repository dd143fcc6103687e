#pragma once

// Equidistant parameterization for a smooth convex positive f. The foot
// point (t, f(t)) of the closest-point projection determines the midset
// point
//
//   x(t) = t + f grad f / (1 + W),   y(t) = f W / (1 + W),   W = sqrt(1 + |grad f|^2),
//
// and G = y o x^{-1}. x is a bijection with regular Jacobian, so x^{-1} is
// computed by damped Newton.

#include "equimid/error.hpp"
#include "equimid/general_solver.hpp"
#include "equimid/numeric.hpp"
#include "equimid/report.hpp"
#include "equimid/scalar_field.hpp"
#include "equimid/types.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace equimid {

struct ParamPoint {
  Vector x;
  double y = 0.0;
};

struct NewtonConfig {
  double tolerance = 1e-13;  // residual, relative to max(1, |target|)
  int max_iterations = 100;
  int max_halvings = 40;
};

class EquidistantParam {
 public:
  /// Throws GradientUnavailable when f has no gradient (abs/min/max fields).
  explicit EquidistantParam(ScalarField f, NewtonConfig cfg = {}) : f_(std::move(f)), cfg_(cfg) {
    if (f_.gradient_kind() == Derivative::None)
      throw GradientUnavailable("equidistant parameterization needs a differentiable field; got " + f_.describe());
  }

  const ScalarField& field() const { return f_; }
  int dimension() const { return f_.dimension(); }

  ParamPoint point(const Vector& t) const {
    const double f = f_(t);
    const Vector grad = f_.gradient(t);
    const double w = std::sqrt(1.0 + grad.squaredNorm());
    return {t + (f / (1.0 + w)) * grad, f * w / (1.0 + w)};
  }

  /// g(t) = (x(t) - t) / y(t) = grad f / W; always |g| < 1.
  Vector g(const Vector& t) const {
    const Vector grad = f_.gradient(t);
    return grad / std::sqrt(1.0 + grad.squaredNorm());
  }

  /// Directional derivative of x along v from the closed form
  ///   d_v x = v + [d_v f (1+W) W - f <grad f, d_v grad f>] / ((1+W)^2 W) grad f
  ///             + f / (1+W) d_v grad f.
  Vector directional_derivative(const Vector& t, const Vector& v) const {
    const double f = f_(t);
    const Vector grad = f_.gradient(t);
    const Vector dgrad = f_.hess_vec(t, v);
    const double w = std::sqrt(1.0 + grad.squaredNorm());
    const double dvf = grad.dot(v);
    const double coeff = (dvf * (1.0 + w) * w - f * grad.dot(dgrad)) / ((1.0 + w) * (1.0 + w) * w);
    return v + coeff * grad + (f / (1.0 + w)) * dgrad;
  }

  /// Same derivative by central differences on point(), step 1e-6 max(1, |t|).
  Vector directional_derivative_fd(const Vector& t, const Vector& v) const {
    return numeric::fd_directional([this](const Vector& s) { return point(s).x; }, t, v, 1e-6);
  }

  Matrix jacobian(const Vector& t) const {
    const int n = dimension();
    Matrix J(n, n);
    for (int j = 0; j < n; ++j) J.col(j) = directional_derivative(t, Vector::Unit(n, j));
    return J;
  }

  /// Solves x(t) = target. Starts from t = target and takes Newton steps,
  /// halving any step that does not reduce the residual norm. Throws
  /// NoConvergence, which in practice means f is not convex or not smooth.
  Vector invert_x(const Vector& target) const {
    if (target.size() != dimension()) throw DimensionError("invert_x target has the wrong dimension");
    const double scale = std::max(1.0, target.norm());
    Vector t = target;
    Vector r = point(t).x - target;
    double rn = r.norm();
    for (int iter = 0; iter < cfg_.max_iterations; ++iter) {
      if (rn <= cfg_.tolerance * scale) return t;
      const Vector step = jacobian(t).partialPivLu().solve(-r);
      double lambda = 1.0;
      bool accepted = false;
      for (int h = 0; h <= cfg_.max_halvings; ++h, lambda *= 0.5) {
        const Vector trial = t + lambda * step;
        const Vector rt = point(trial).x - target;
        const double rtn = rt.norm();
        if (rtn < rn) {
          t = trial;
          r = rt;
          rn = rtn;
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        // Stalled at rounding level.
        if (rn <= 1e3 * cfg_.tolerance * scale) return t;
        break;
      }
    }
    if (rn <= 1e3 * cfg_.tolerance * scale) return t;
    throw NoConvergence("Newton inversion of x(t) did not converge (residual " + detail::sci(rn) + ")");
  }

  double eval_G(const Vector& x) const { return point(invert_x(x)).y; }

 private:
  ScalarField f_;
  NewtonConfig cfg_;
};

inline EquidistantFunction parametric_G(const EquidistantParam& param) {
  return {param.field(), [param](const Vector& x) { return param.eval_G(x); }, "parametric"};
}

/// grad G at x(t) from the parameterization alone:
/// g / (1 + sqrt(1 - |g|^2)) = (x - t) / (y + sqrt(y^2 - |x - t|^2)).
inline Vector gradient_of_G_at_foot(const Vector& t, const ParamPoint& p) {
  const Vector d = p.x - t;
  return d / (p.y + std::sqrt(std::max(0.0, p.y * p.y - d.squaredNorm())));
}

/// Checks <d_v x, v + d_v f / (1 + W) grad f> >= |v|^2 for each direction,
/// with d_v x from the closed form; the finite-difference derivative is
/// compared against it in a second condition.
inline CheckReport jacobian_bound_check(const EquidistantParam& param, const Vector& t, std::span<const Vector> directions,
                                        double tolerance = 1e-9, double fd_tolerance = 1e-6) {
  CheckReport report{"jacobian_bound", {}, true, ""};
  Condition bound{"inner_product_bound"};
  Condition agree{"analytic_matches_fd"};
  const ScalarField& f = param.field();
  const Vector grad = f.gradient(t);
  const double w = std::sqrt(1.0 + grad.squaredNorm());
  for (const Vector& raw : directions) {
    const double len = raw.norm();
    if (len == 0.0) continue;
    const Vector v = raw / len;
    const Vector dx = param.directional_derivative(t, v);
    const Vector partner = v + (grad.dot(v) / (1.0 + w)) * grad;
    bound.record(v.squaredNorm() - dx.dot(partner) - tolerance);
    const Vector dx_fd = param.directional_derivative_fd(t, v);
    agree.record((dx - dx_fd).norm() - fd_tolerance * std::max(1.0, dx.norm()));
  }
  report.conditions.push_back(bound);
  report.conditions.push_back(agree);
  return report;
}

/// A candidate parameterization x: R^n -> R^n, y: R^n -> R^+ together with
/// the sample grid used to test it.
struct ParamValidationInput {
  std::function<Vector(const Vector&)> x;
  std::function<double(const Vector&)> y;
  int dimension = 1;
  std::vector<Vector> samples;

  static ParamValidationInput from_param(const EquidistantParam& param, std::vector<Vector> samples) {
    return {[param](const Vector& t) { return param.point(t).x; }, [param](const Vector& t) { return param.point(t).y; },
            param.dimension(), std::move(samples)};
  }

  /// x components and y given as expressions in t1..tn.
  static ParamValidationInput from_fields(std::vector<ScalarField> xs, ScalarField y, std::vector<Vector> samples) {
    const int n = y.dimension();
    if (static_cast<int>(xs.size()) != n) throw DimensionError("need one x component per dimension");
    for (const auto& c : xs)
      if (c.dimension() != n) throw DimensionError("x component dimension mismatch");
    return {[xs](const Vector& t) {
              Vector out(static_cast<Eigen::Index>(xs.size()));
              for (std::size_t i = 0; i < xs.size(); ++i) out[static_cast<Eigen::Index>(i)] = xs[i](t);
              return out;
            },
            [y](const Vector& t) { return y(t); }, n, std::move(samples)};
  }
};

/// Recovers the generating function: f(t) = y + sqrt(y^2 - |x - t|^2).
inline double reconstruct_f(const ParamValidationInput& input, const Vector& t) {
  const Vector x = input.x(t);
  const double y = input.y(t);
  const double radicand = y * y - (x - t).squaredNorm();
  if (radicand < 0.0)
    throw NegativeRadicand("y^2 < |x - t|^2 at the requested parameter (|g| >= 1)");
  return y + std::sqrt(radicand);
}

/// Tests whether (x, y) is an equidistant parameterization on the sample
/// grid: (a) |g| < 1, (b) <d_i x, g> / (1 + sqrt(1 - |g|^2)) = d_i y for each
/// i, (c) X = g / sqrt(1 - |g|^2) is monotone on all sample pairs.
/// Derivatives are central differences. Passing means no violation was found
/// on the grid, not a proof.
inline CheckReport validate_parameterization(const ParamValidationInput& input, double tolerance = 1e-6,
                                             double monotone_tolerance = 1e-9) {
  CheckReport report{"parameterization", {}, true, ""};
  Condition norm_g{"g_norm_lt_1"};
  Condition grad_rel{"gradient_relation"};
  Condition mono{"X_monotone"};

  std::vector<Vector> X;
  bool all_g_ok = true;
  for (const Vector& t : input.samples) {
    const Vector x = input.x(t);
    const double y = input.y(t);
    const Vector g = (x - t) / y;
    const double gn2 = g.squaredNorm();
    norm_g.record(gn2 < 1.0 && y > 0.0 ? 0.0 : std::max(std::sqrt(gn2) - 1.0, std::numeric_limits<double>::min()));
    if (!(gn2 < 1.0) || !(y > 0.0)) {
      all_g_ok = false;
      continue;
    }
    const double root = std::sqrt(1.0 - gn2);
    X.push_back(g / root);

    const Matrix Jx = numeric::fd_jacobian(input.x, t);
    const Vector grad_y = numeric::fd_gradient(input.y, t);
    for (int i = 0; i < input.dimension; ++i) {
      const double lhs = Jx.col(i).dot(g) / (1.0 + root);
      grad_rel.record(std::abs(lhs - grad_y[i]) - tolerance);
    }
  }
  if (all_g_ok) {
    for (std::size_t i = 0; i < input.samples.size(); ++i)
      for (std::size_t j = i + 1; j < input.samples.size(); ++j)
        mono.record(-(X[i] - X[j]).dot(input.samples[i] - input.samples[j]) - monotone_tolerance);
  } else {
    mono.evaluated = false;
    mono.detail = "skipped: |g| >= 1 at some sample";
  }
  report.conditions = {norm_g, grad_rel, mono};
  report.note = "no violation found on grid is evidence, not proof";
  return report;
}

/// The paraboloid of points equidistant from K and the single focal point
/// (s, f(s)), evaluated at abscissa x.
inline double paraboloid_height(const ScalarField& f, const Vector& s, const Vector& x) {
  const double fs = f(s);
  return (x - s).squaredNorm() / (2.0 * fs) + 0.5 * fs;
}

/// Envelope property at parameter t: (i) (x(t), y(t)) lies on the paraboloid
/// of parameter t; (ii) the paraboloid's gradient there equals grad G o x(t),
/// both from the closed form and from finite differences of y o x^{-1};
/// (iii) the paraboloids of the probe parameters lie on or above y(t) at x(t).
inline CheckReport envelope_check(const EquidistantParam& param, const Vector& t, std::span<const Vector> probes,
                                  double tolerance = 1e-10, double fd_tolerance = 1e-6) {
  CheckReport report{"envelope", {}, true, ""};
  const ScalarField& f = param.field();
  const ParamPoint p = param.point(t);
  const double ft = f(t);

  Condition member{"membership"};
  member.record(std::abs(paraboloid_height(f, t, p.x) - p.y) - tolerance * std::max(1.0, p.y));

  Condition tangent{"tangency"};
  const Vector parab_grad = (p.x - t) / ft;
  tangent.record((parab_grad - gradient_of_G_at_foot(t, p)).norm() - tolerance);

  Condition tangent_fd{"tangency_fd"};
  const Vector fd_grad = numeric::fd_gradient([&](const Vector& x) { return param.eval_G(x); }, p.x);
  tangent_fd.record((parab_grad - fd_grad).norm() - fd_tolerance);

  Condition below{"envelope_below"};
  for (const Vector& s : probes) below.record(p.y - paraboloid_height(f, s, p.x) - tolerance);

  report.conditions = {member, tangent, tangent_fd, below};
  return report;
}

}  // namespace equimid
