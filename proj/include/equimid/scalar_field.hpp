#pragma once

#include "equimid/dual.hpp"
#include "equimid/error.hpp"
#include "equimid/expr.hpp"
#include "equimid/numeric.hpp"
#include "equimid/types.hpp"

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace equimid {

/// How a derivative of a field is obtained.
enum class Derivative { Exact, FiniteDifference, None };

/// A function f: R^n -> R with gradient access. Either a parsed expression
/// (exact forward-mode derivatives unless it contains abs/min/max) or a
/// built-in callable (finite differences unless a gradient is supplied).
///
/// Instances are immutable and cheap to copy; evaluation is reentrant.
class ScalarField {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;

  explicit ScalarField(Expr expr)
      : dimension_(expr.dimension()),
        smooth_(expr.smooth()),
        expr_(std::make_shared<const Expr>(std::move(expr))) {}

  static ScalarField parse(std::string_view source, int dimension) { return ScalarField(Expr::parse(source, dimension)); }

  static ScalarField constant(double value, int dimension) { return ScalarField(Expr::constant(value, dimension)); }

  static ScalarField builtin(int dimension, ValueFn value, GradientFn gradient = {}, std::string label = "builtin") {
    ScalarField f;
    f.dimension_ = dimension;
    f.smooth_ = true;
    f.value_ = std::move(value);
    f.gradient_ = std::move(gradient);
    f.label_ = std::move(label);
    return f;
  }

  /// Pointwise minimum of the children. Expression children are merged into
  /// a single min(...) expression. Never differentiable.
  static ScalarField pointwise_min(std::span<const ScalarField> children) {
    if (children.empty()) throw EmptyFamily("pointwise minimum of an empty family");
    const int n = children.front().dimension();
    for (const auto& c : children)
      if (c.dimension() != n) throw DimensionError("pointwise minimum of fields with different dimensions");

    const bool all_expr = std::all_of(children.begin(), children.end(), [](const ScalarField& c) { return c.expr_ != nullptr; });
    if (all_expr) {
      std::vector<Expr> exprs;
      for (const auto& c : children) exprs.push_back(*c.expr_);
      return ScalarField(Expr::combine(Op::Min, exprs));
    }
    std::vector<ScalarField> copy(children.begin(), children.end());
    ScalarField f = builtin(
        n,
        [copy](const Vector& t) {
          double m = copy.front()(t);
          for (std::size_t i = 1; i < copy.size(); ++i) m = std::min(m, copy[i](t));
          return m;
        },
        {}, "min");
    f.smooth_ = false;
    return f;
  }

  int dimension() const { return dimension_; }

  /// Null for built-in fields.
  const Expr* expression() const { return expr_.get(); }

  std::string describe() const { return expr_ ? expr_->to_string() : label_; }

  Derivative gradient_kind() const {
    if (!smooth_) return Derivative::None;
    if (expr_ || gradient_) return Derivative::Exact;
    return Derivative::FiniteDifference;
  }

  Derivative hessian_kind() const {
    if (!smooth_) return Derivative::None;
    return expr_ ? Derivative::Exact : Derivative::FiniteDifference;
  }

  double operator()(const Vector& t) const {
    check_dimension(t);
    if (expr_) return expr_->evaluate<double>(std::span<const double>(t.data(), static_cast<std::size_t>(t.size())));
    return value_(t);
  }

  /// Throws NonDifferentiable for fields containing abs/min/max.
  Vector gradient(const Vector& t) const {
    check_dimension(t);
    require_smooth("gradient");
    if (expr_) {
      using D = Dual<double>;
      std::vector<D> seed(static_cast<std::size_t>(dimension_));
      Vector g(dimension_);
      for (int j = 0; j < dimension_; ++j) {
        for (int i = 0; i < dimension_; ++i) seed[i] = D(t[i], i == j ? 1.0 : 0.0);
        g[j] = expr_->evaluate<D>(seed).d;
      }
      return g;
    }
    if (gradient_) return gradient_(t);
    return numeric::fd_gradient(value_, t);
  }

  /// Hessian-vector product: the derivative of the gradient along v.
  Vector hess_vec(const Vector& t, const Vector& v) const {
    check_dimension(t);
    check_dimension(v);
    require_smooth("Hessian");
    if (expr_) {
      using D1 = Dual<double>;
      using D2 = Dual<D1>;
      std::vector<D2> seed(static_cast<std::size_t>(dimension_));
      Vector out(dimension_);
      for (int j = 0; j < dimension_; ++j) {
        for (int i = 0; i < dimension_; ++i) seed[i] = D2(D1(t[i], v[i]), D1(i == j ? 1.0 : 0.0, 0.0));
        out[j] = expr_->evaluate<D2>(seed).d.d;
      }
      return out;
    }
    const double vn = v.norm();
    if (vn == 0.0) return Vector::Zero(dimension_);
    // Differencing a finite-difference gradient needs a wider outer step.
    const double rel = gradient_ ? std::cbrt(std::numeric_limits<double>::epsilon())
                                 : std::pow(std::numeric_limits<double>::epsilon(), 0.25);
    const double h = rel * std::max(1.0, t.norm()) / vn;
    return (gradient(t + h * v) - gradient(t - h * v)) / (2.0 * h);
  }

 private:
  ScalarField() = default;

  void check_dimension(const Vector& t) const {
    if (t.size() != dimension_)
      throw DimensionError("field of dimension " + std::to_string(dimension_) + " evaluated at a point of dimension " +
                           std::to_string(t.size()));
  }

  void require_smooth(const char* what) const {
    if (!smooth_) throw NonDifferentiable(std::string(what) + " requested for non-differentiable field " + describe());
  }

  int dimension_ = 0;
  bool smooth_ = true;
  std::shared_ptr<const Expr> expr_;
  ValueFn value_;
  GradientFn gradient_;
  std::string label_;
};

}  // namespace equimid
