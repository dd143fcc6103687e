#pragma once

// Equidistant function of the hyperplane K and epi f for an arbitrary
// positive continuous f, computed by bisection on the vertical line over x,
// plus the order-theoretic checks that hold for every such f.

#include "equimid/error.hpp"
#include "equimid/focal.hpp"
#include "equimid/report.hpp"
#include "equimid/scalar_field.hpp"
#include "equimid/types.hpp"

#include <cmath>
#include <algorithm>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace equimid {

struct BisectionConfig {
  double tolerance = 1e-10;  // on the equidistance residual d((x,z),L) - z
  int max_iterations = 80;
};

/// Solves d((x, z), L) = z for z in (0, f(x)). The residual is positive at
/// z = 0 and negative at z = f(x), and the root is unique. Throws
/// OracleFailure when the distance search cannot be completed.
inline double solve_G_at(const Vector& x, const EpigraphFocal& L, const BisectionConfig& cfg = {}) {
  const double top = L.field(x);
  if (!(top > 0.0)) throw Error("generating function must be positive; f(x) = " + std::to_string(top));

  auto residual = [&](double z) {
    try {
      return distance_to_epigraph(SpacePoint(x, z), L).distance - z;
    } catch (const BoxTooSmall& e) {
      throw OracleFailure(std::string("distance oracle failed: ") + e.what());
    }
  };

  double lo = 0.0;
  double hi = top;
  double mid = 0.5 * (lo + hi);
  for (int k = 0; k < cfg.max_iterations; ++k) {
    mid = 0.5 * (lo + hi);
    const double r = residual(mid);
    if (std::abs(r) <= 0.5 * cfg.tolerance) return mid;
    if (r > 0.0) lo = mid;
    else hi = mid;
    if (hi - lo <= cfg.tolerance) break;
  }
  return 0.5 * (lo + hi);
}

/// An evaluable equidistant function G together with the field that
/// generates it. The evaluation strategy is type-erased: bisection for
/// general f, y(x^{-1}(.)) for smooth convex f.
class EquidistantFunction {
 public:
  using Evaluator = std::function<double(const Vector&)>;

  EquidistantFunction(ScalarField generator, Evaluator evaluate, std::string mode)
      : generator_(std::move(generator)), evaluate_(std::move(evaluate)), mode_(std::move(mode)) {}

  static EquidistantFunction bisection(EpigraphFocal focal, BisectionConfig cfg = {}) {
    ScalarField f = focal.field;
    return {std::move(f), [L = std::move(focal), cfg](const Vector& x) { return solve_G_at(x, L, cfg); }, "bisect"};
  }

  static EquidistantFunction bisection(const ScalarField& f, BisectionConfig cfg = {}) {
    return bisection(EpigraphFocal(f), cfg);
  }

  double operator()(const Vector& x) const { return evaluate_(x); }
  int dimension() const { return generator_.dimension(); }
  const ScalarField& generator() const { return generator_; }
  const std::string& mode() const { return mode_; }

 private:
  ScalarField generator_;
  Evaluator evaluate_;
  std::string mode_;
};

/// min_i G_i(x), which is also the equidistant function of min_i f_i.
inline double min_compose(std::span<const EquidistantFunction> family, const Vector& x) {
  if (family.empty()) throw EmptyFamily("min_compose needs at least one equidistant function");
  double best = family.front()(x);
  for (std::size_t i = 1; i < family.size(); ++i) {
    if (family[i].dimension() != family.front().dimension())
      throw DimensionError("min_compose over functions of different dimensions");
    best = std::min(best, family[i](x));
  }
  return best;
}

/// Compares bisection on f_min = min_i f_i against min_i G_i at each sample.
inline CheckReport min_composition_check(std::span<const ScalarField> fields, std::span<const Vector> samples,
                                         double tolerance = 1e-7, BisectionConfig cfg = {}) {
  if (fields.empty()) throw EmptyFamily("min_composition_check needs at least one field");
  std::vector<EquidistantFunction> family;
  for (const auto& f : fields) family.push_back(EquidistantFunction::bisection(f, cfg));
  const EquidistantFunction combined = EquidistantFunction::bisection(ScalarField::pointwise_min(fields), cfg);

  CheckReport report{"min_composition", {}, true, ""};
  Condition c{"G_min_equals_min_G"};
  for (const auto& x : samples) {
    const double diff = std::abs(combined(x) - min_compose(family, x));
    c.record(diff - tolerance);
  }
  report.conditions.push_back(c);
  return report;
}

/// Checks 0 < G(x) < f(x).
inline CheckReport sandwich_check(const EquidistantFunction& G, std::span<const Vector> samples) {
  CheckReport report{"sandwich", {}, true, ""};
  Condition c{"zero_lt_G_lt_f"};
  for (const auto& x : samples) {
    const double g = G(x);
    const double f = G.generator()(x);
    c.record(g > 0.0 && g < f ? 0.0 : std::max({-g, g - f, std::numeric_limits<double>::min()}));
  }
  report.conditions.push_back(c);
  return report;
}

/// If f1 < f2 at every sample then G1 < G2 there. When the premise fails
/// somewhere the report is marked "precondition unmet" and nothing is tested.
inline CheckReport monotonicity_check(const ScalarField& f1, const ScalarField& f2, std::span<const Vector> samples,
                                      double tolerance = 1e-10, BisectionConfig cfg = {}) {
  CheckReport report{"monotonicity", {}, true, ""};
  for (const auto& x : samples) {
    if (!(f1(x) < f2(x))) {
      report.precondition_met = false;
      report.note = "precondition unmet: f1 < f2 fails at some sample";
      return report;
    }
  }
  const auto G1 = EquidistantFunction::bisection(f1, cfg);
  const auto G2 = EquidistantFunction::bisection(f2, cfg);
  Condition c{"G1_lt_G2"};
  for (const auto& x : samples) c.record(G1(x) - G2(x) - tolerance);
  report.conditions.push_back(c);
  return report;
}

struct ConvexityTriple {
  Vector a;
  Vector b;
  double lambda = 0.0;
};

/// G(lambda a + (1 - lambda) b) <= lambda G(a) + (1 - lambda) G(b) + tolerance.
/// Meaningful only when the generating f is convex.
inline CheckReport convexity_check(const EquidistantFunction& G, std::span<const ConvexityTriple> triples,
                                   double tolerance = 1e-8) {
  CheckReport report{"convexity", {}, true, ""};
  Condition c{"jensen"};
  for (const auto& [a, b, lambda] : triples) {
    const Vector mid = lambda * a + (1.0 - lambda) * b;
    c.record(G(mid) - (lambda * G(a) + (1.0 - lambda) * G(b)) - tolerance);
  }
  report.conditions.push_back(c);
  return report;
}

}  // namespace equimid
