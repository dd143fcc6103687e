// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include "equimid/equimid.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

namespace {

using namespace equimid;
using equimid::testing::Sampler;

int failures = 0;

void verdict(int id, bool ok, const std::string& what, const std::string& measured) {
  std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", id, what.c_str(), measured.c_str());
  if (!ok) ++failures;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

// Guards a criterion body so an exception counts as a failure.
void criterion(int id, const std::string& what, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    verdict(id, false, what, std::string("exception: ") + e.what());
  }
}

std::vector<Vector> linspace(double lo, double hi, int count) { return equimid::testing::linspace_1d(lo, hi, count); }

void golden_agreement() {
  criterion(1, "golden G vs bisection and y o x^-1 on 201 points", [] {
    const auto start = std::chrono::steady_clock::now();
    const auto f = hyperboloid::generator(1);
    const auto bisect = EquidistantFunction::bisection(f);
    const EquidistantParam P(f);
    double err_bisect = 0.0, err_param = 0.0;
    for (const auto& x : linspace(-8.0, 8.0, 201)) {
      const double g = hyperboloid::golden_G(x);
      err_bisect = std::max(err_bisect, std::abs(g - bisect(x)));
      err_param = std::max(err_param, std::abs(g - P.eval_G(x)));
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    verdict(1, err_bisect <= 1e-7 && err_param <= 1e-8 && seconds < 10.0, "golden G vs bisection and y o x^-1 on 201 points",
            fmt("max bisect err %.3e <= 1e-7, max param err %.3e <= 1e-8, %.2f s < 10 s", err_bisect, err_param, seconds));
  });
}

void parametric_equidistance() {
  criterion(2, "brute-force distance of (x(t), y(t)) equals y(t)", [] {
    Sampler rng(2002);
    double worst[2] = {0.0, 0.0};
    for (int n : {1, 2}) {
      const auto f = hyperboloid::generator(n);
      const EquidistantParam P(f);
      const EpigraphFocal L(f);
      for (int k = 0; k < 500; ++k) {
        const ParamPoint p = P.point(rng.point(n, -5.0, 5.0));
        const double d = distance_to_epigraph(SpacePoint(p.x, p.y), L).distance;
        worst[n - 1] = std::max(worst[n - 1], std::abs(d - p.y));
      }
    }
    verdict(2, worst[0] <= 1e-6 && worst[1] <= 1e-6, "brute-force distance of (x(t), y(t)) equals y(t)",
            fmt("500 points each, max |d - y| n=1 %.3e, n=2 %.3e, tol 1e-6", worst[0], worst[1]));
  });
}

void cubic_residual_check() {
  criterion(3, "cubic residual of x_inverse_1d", [] {
    Sampler rng(3003);
    std::vector<double> inputs = {hyperboloid::kBreakpoint, -hyperboloid::kBreakpoint,
                                  std::nextafter(hyperboloid::kBreakpoint, 0.0),
                                  std::nextafter(hyperboloid::kBreakpoint, 10.0),
                                  std::nextafter(-hyperboloid::kBreakpoint, 0.0),
                                  std::nextafter(-hyperboloid::kBreakpoint, -10.0)};
    while (inputs.size() < 1000) inputs.push_back(rng.uniform(-10.0, 10.0));
    double worst = 0.0;
    for (double s : inputs) {
      const double r = std::abs(hyperboloid::cubic_residual(s, hyperboloid::x_inverse_1d(s)));
      worst = std::max(worst, r / (1e-8 * (1.0 + std::abs(s * s * s))));
    }
    verdict(3, worst <= 1.0, "cubic residual of x_inverse_1d",
            fmt("1000 inputs incl. +-x2 = %.16g, max residual / (1e-8 (1+|s|^3)) = %.3e <= 1", hyperboloid::kBreakpoint,
                worst));
  });
}

void min_composition() {
  criterion(4, "min-composition for two shifted hyperboloids", [] {
    const std::vector<ScalarField> fields = {ScalarField::parse("sqrt(t1^2+1)", 1),
                                             ScalarField::parse("sqrt((t1-3)^2+1)", 1)};
    const auto samples = linspace(-4.0, 7.0, 50);
    const auto report = min_composition_check(fields, samples, 1e-7);
    const Condition& c = report.conditions.front();
    verdict(4, report.passed(), "min-composition for two shifted hyperboloids",
            fmt("%g grid points, violations %g, worst excess over 1e-7 %.3e", static_cast<double>(c.samples),
                static_cast<double>(c.violations), c.worst));
  });
}

void characterization_roundtrip() {
  criterion(5, "characterization of golden G and reconstruction of f", [] {
    const auto report = characterize({hyperboloid::golden_field(1), linspace(-6.0, 6.0, 50)});
    double worst = report.passed() ? 0.0 : INFINITY;
    if (report.reconstructed)
      for (const auto& s : *report.reconstructed)
        worst = std::max(worst, std::abs(s.f - std::sqrt(s.t.squaredNorm() + 1.0)));
    const bool ok = report.passed() && report.reconstructed && report.reconstructed->size() == 50 && worst <= 1e-6;
    verdict(5, ok, "characterization of golden G and reconstruction of f",
            std::string("conditions ") + (report.passed() ? "pass" : "fail") +
                fmt(", 50 points, max |f_rec - sqrt(t^2+1)| %.3e <= 1e-6", worst));
  });
}

void invariant_suites() {
  criterion(6, "invariant suites", [] {
    std::vector<std::string> failed;
    auto require = [&](const CheckReport& r) {
      if (!r.passed()) failed.push_back(r.name);
    };
    Sampler rng(6006);
    const auto f = hyperboloid::generator(1);
    const EpigraphFocal L(f);

    std::vector<std::pair<SpacePoint, SpacePoint>> pairs;
    for (int k = 0; k < 1000; ++k)
      pairs.emplace_back(SpacePoint(rng.point(1, -5.0, 5.0), rng.uniform(-1.0, 6.0)),
                         SpacePoint(rng.point(1, -5.0, 5.0), rng.uniform(-1.0, 6.0)));
    require(lipschitz_check(L, pairs));

    const auto G = EquidistantFunction::bisection(L);
    const auto grid = linspace(-5.0, 5.0, 41);
    require(sandwich_check(G, grid));

    std::vector<ConvexityTriple> triples;
    for (int k = 0; k < 100; ++k) triples.push_back({rng.point(1, -5.0, 5.0), rng.point(1, -5.0, 5.0), rng.uniform(0.0, 1.0)});
    require(convexity_check(G, triples));

    require(monotonicity_check(f, ScalarField::parse("sqrt(t1^2+1) + 1", 1), linspace(-4.0, 4.0, 50)));

    for (int n : {1, 2}) {
      const EquidistantParam P(hyperboloid::generator(n));
      require(validate_parameterization(ParamValidationInput::from_param(P, rng.points(40, n, -5.0, 5.0))));

      CheckReport roundtrip{"H_of_x_is_identity", {Condition("roundtrip")}, true, ""};
      const auto Gn = hyperboloid::golden_field(n);
      for (int k = 0; k < 50; ++k) {
        const Vector t = rng.point(n, -5.0, 5.0);
        roundtrip.conditions[0].record((h_map(Gn, P.point(t).x) - t).norm() - 1e-8);
      }
      require(roundtrip);

      for (int k = 0; k < 20; ++k) {
        const Vector t = rng.point(n, -4.0, 4.0);
        require(envelope_check(P, t, rng.points(10, n, -6.0, 6.0)));
      }
    }
    std::string measured = failed.empty() ? "lipschitz, sandwich, convexity, monotonicity, |g|<1, H o x = id, envelope: "
                                            "zero violations"
                                          : "failed:";
    for (const auto& name : failed) measured += " " + name;
    verdict(6, failed.empty(), "invariant suites", measured);
  });
}

void gradient_relation() {
  criterion(7, "finite-difference grad G at x(t) vs g / (1 + sqrt(1 - |g|^2))", [] {
    Sampler rng(7007);
    double worst = 0.0;
    for (int n : {1, 2}) {
      const EquidistantParam P(hyperboloid::generator(n));
      const auto G = hyperboloid::golden_field(n);
      for (int k = 0; k < 50; ++k) {
        const Vector t = rng.point(n, -5.0, 5.0);
        const ParamPoint p = P.point(t);
        const Vector fd = numeric::fd_gradient([&](const Vector& x) { return G(x); }, p.x);
        worst = std::max(worst, (fd - gradient_of_G_at_foot(t, p)).norm());
      }
    }
    verdict(7, worst <= 1e-6, "finite-difference grad G at x(t) vs g / (1 + sqrt(1 - |g|^2))",
            fmt("100 points (50 with n=1, 50 with n=2), max deviation %.3e <= 1e-6", worst));
  });
}

}  // namespace

int main() {
  golden_agreement();
  parametric_equidistance();
  cubic_residual_check();
  min_composition();
  characterization_roundtrip();
  invariant_suites();
  gradient_relation();
  std::printf("%d of 7 criteria failed\n", failures);
  return failures;
}
