// equimid: sample equidistant functions and run property checks from the
// command line.
//
// Exit codes: 0 success, 1 check failed, 2 usage or parse error, 3 solver
// failure.

#include "equimid/equimid.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace equimid;
using json = nlohmann::ordered_json;

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Axis {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
};

double parse_double(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(v))
    throw UsageError("bad number '" + std::string(text) + "' in " + std::string(what));
  return v;
}

std::vector<double> parse_list(std::string_view text, std::string_view what) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_double(text.substr(0, comma), what));
    if (comma == std::string_view::npos) return out;
    text.remove_prefix(comma + 1);
  }
}

Axis parse_axis(const std::string& spec) {
  const auto a = spec.find(':');
  const auto b = a == std::string::npos ? a : spec.find(':', a + 1);
  if (b == std::string::npos) throw UsageError("range must be MIN:MAX:COUNT, got '" + spec + "'");
  const std::string_view s(spec);
  Axis axis{parse_double(s.substr(0, a), "--range"), parse_double(s.substr(a + 1, b - a - 1), "--range"), 0};
  const auto count = s.substr(b + 1);
  const auto [end, ec] = std::from_chars(count.data(), count.data() + count.size(), axis.count);
  if (ec != std::errc() || end != count.data() + count.size()) throw UsageError("bad count in range '" + spec + "'");
  if (axis.count < 2) throw UsageError("range count must be at least 2");
  if (!(axis.lo < axis.hi)) throw UsageError("range needs MIN < MAX");
  return axis;
}

// One axis spec per dimension; a single spec is reused for every axis.
std::vector<Axis> parse_axes(const std::vector<std::string>& specs, int n, const std::string& fallback) {
  std::vector<Axis> axes;
  for (const auto& s : specs) axes.push_back(parse_axis(s));
  if (axes.empty()) axes.push_back(parse_axis(fallback));
  if (axes.size() == 1) axes.resize(static_cast<std::size_t>(n), axes.front());
  if (static_cast<int>(axes.size()) != n)
    throw UsageError("got " + std::to_string(axes.size()) + " ranges for dimension " + std::to_string(n));
  return axes;
}

// Cartesian grid, first axis slowest.
std::vector<Vector> make_grid(const std::vector<Axis>& axes) {
  std::size_t total = 1;
  for (const auto& a : axes) total *= static_cast<std::size_t>(a.count);
  std::vector<Vector> grid(total, Vector(static_cast<Eigen::Index>(axes.size())));
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rest = k;
    for (std::size_t d = axes.size(); d-- > 0;) {
      const auto& a = axes[d];
      const std::size_t i = rest % static_cast<std::size_t>(a.count);
      rest /= static_cast<std::size_t>(a.count);
      grid[k][static_cast<Eigen::Index>(d)] =
          i + 1 == static_cast<std::size_t>(a.count) ? a.hi : a.lo + (a.hi - a.lo) * static_cast<double>(i) / (a.count - 1);
    }
  }
  return grid;
}

int resolve_dimension(int n, const std::vector<std::string>& ranges) {
  if (n > 0) return n;
  return ranges.size() > 1 ? static_cast<int>(ranges.size()) : 1;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string render(const Table& t, const std::string& format) {
  std::ostringstream out;
  if (format == "json") {
    json doc;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      json col = json::array();
      for (const auto& r : t.rows) col.push_back(r[c]);
      doc[t.columns[c]] = std::move(col);
    }
    out << doc.dump(2) << '\n';
    return out.str();
  }
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
  out << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << format_number(r[c]);
    out << '\n';
  }
  return out.str();
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot write " + path);
  file << text;
}

std::vector<std::string> axis_names(const char* prefix, int n) {
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) names.push_back(prefix + std::to_string(i));
  return names;
}

// Fills rows in parallel; row k depends only on grid[k].
template <typename RowFn>
std::vector<std::vector<double>> fill_rows(const std::vector<Vector>& grid, const RowFn& row) {
  std::vector<std::vector<double>> rows(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) { rows[k] = row(grid[k]); });
  return rows;
}

std::vector<double> coords(const Vector& v) { return {v.data(), v.data() + v.size()}; }

// ---------------------------------------------------------------- sample

struct SampleOptions {
  std::string f;
  int n = 0;
  std::string mode = "bisect";
  std::vector<std::string> ranges;
  double tol = 1e-10;
  std::string out;
  std::string format = "csv";
};

int run_sample(const SampleOptions& o) {
  const int n = resolve_dimension(o.n, o.ranges);
  const auto grid = make_grid(parse_axes(o.ranges, n, "-4:4:81"));
  Table table;

  if (o.mode == "golden") {
    table.columns = axis_names("x", n);
    table.columns.push_back("G");
    table.rows = fill_rows(grid, [](const Vector& x) {
      auto r = coords(x);
      r.push_back(hyperboloid::golden_G(x));
      return r;
    });
  } else {
    if (o.f.empty()) throw UsageError("--f is required for mode " + o.mode);
    const auto f = ScalarField::parse(o.f, n);
    if (o.mode == "parametric") {
      NewtonConfig cfg;
      const EquidistantParam P(f, cfg);
      table.columns = axis_names("t", n);
      table.columns.push_back("f");
      for (const auto& c : axis_names("x", n)) table.columns.push_back(c);
      table.columns.push_back("y");
      table.rows = fill_rows(grid, [&](const Vector& t) {
        const ParamPoint p = P.point(t);
        auto r = coords(t);
        r.push_back(f(t));
        for (double v : coords(p.x)) r.push_back(v);
        r.push_back(p.y);
        return r;
      });
    } else {
      const auto G = EquidistantFunction::bisection(f, BisectionConfig{o.tol, 80});
      table.columns = axis_names("x", n);
      table.columns.push_back("G");
      table.rows = fill_rows(grid, [&](const Vector& x) {
        auto r = coords(x);
        r.push_back(G(x));
        return r;
      });
    }
  }
  emit(render(table, o.format), o.out);
  return 0;
}

// ---------------------------------------------------------------- golden

struct GoldenOptions {
  int n = 0;
  std::vector<std::string> ranges;
  bool no_bisect = false;
  double tol = 1e-10;
  std::string out;
  std::string format = "csv";
};

int run_golden(const GoldenOptions& o) {
  const int n = resolve_dimension(o.n, o.ranges);
  const auto grid = make_grid(parse_axes(o.ranges, n, "-8:8:201"));
  const auto f = hyperboloid::generator(n);
  const EquidistantParam P(f);
  const auto bisect = EquidistantFunction::bisection(f, BisectionConfig{o.tol, 80});

  Table table;
  table.columns = axis_names("x", n);
  table.columns.push_back("G");
  if (!o.no_bisect) table.columns.push_back("err_bisect");
  table.columns.push_back("err_param");
  if (n >= 2) table.columns.push_back("radial_dev");
  table.rows = fill_rows(grid, [&](const Vector& x) {
    const double g = hyperboloid::golden_G(x);
    auto r = coords(x);
    r.push_back(g);
    if (!o.no_bisect) r.push_back(std::abs(g - bisect(x)));
    const double param = P.eval_G(x);
    r.push_back(std::abs(g - param));
    if (n >= 2) {
      // The parametric solve along the first axis at the same radius.
      Vector axis = Vector::Zero(n);
      axis[0] = x.norm();
      r.push_back(std::abs(param - P.eval_G(axis)));
    }
    return r;
  });
  emit(render(table, o.format), o.out);
  return 0;
}

// ---------------------------------------------------------------- check

struct CheckOptions {
  std::string kind;
  std::string f;
  std::string f2;
  std::string G;
  int n = 0;
  std::vector<std::string> ranges;
  std::string t;
  std::string probes;
  std::optional<double> tol;
  int pairs = 200;
  unsigned long long seed = 1;
  std::string out;
  std::string format = "text";
};

json condition_json(const Condition& c) {
  json j;
  j["name"] = c.name;
  j["evaluated"] = c.evaluated;
  j["passed"] = c.passed();
  j["samples"] = c.samples;
  j["violations"] = c.violations;
  j["worst"] = c.worst;
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

json report_json(const CheckReport& r) {
  json j;
  j["check"] = r.name;
  j["passed"] = r.passed();
  j["precondition_met"] = r.precondition_met;
  if (!r.note.empty()) j["note"] = r.note;
  j["conditions"] = json::array();
  for (const auto& c : r.conditions) j["conditions"].push_back(condition_json(c));
  return j;
}

std::string report_text(const CheckReport& r, const json& extra) {
  std::ostringstream out;
  out << "check " << r.name << ": " << (r.passed() ? "PASS" : "FAIL") << '\n';
  if (!r.precondition_met) out << "  " << r.note << '\n';
  for (const auto& c : r.conditions) {
    out << "  " << c.name << ": ";
    if (!c.evaluated) {
      out << "not evaluated";
    } else {
      out << (c.passed() ? "pass" : "FAIL") << " (samples " << c.samples << ", violations " << c.violations
          << ", worst " << format_number(c.worst) << ")";
    }
    if (!c.detail.empty()) out << " " << c.detail;
    out << '\n';
  }
  for (const auto& [key, value] : extra.items()) out << "  " << key << " = " << value.dump() << '\n';
  return out.str();
}

const std::string& require(const std::string& value, const char* flag, const std::string& kind) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required for check " + kind);
  return value;
}

Vector parse_point(std::string_view text, int n, const char* what) {
  const auto v = parse_list(text, what);
  if (static_cast<int>(v.size()) != n)
    throw UsageError(std::string(what) + " needs " + std::to_string(n) + " comma-separated values");
  return Eigen::Map<const Vector>(v.data(), n);
}

// n = 1: "0,0.5,2"; otherwise points separated by ';', e.g. "0,0;1,2".
std::vector<Vector> parse_probes(const std::string& text, int n) {
  std::vector<Vector> out;
  if (n == 1) {
    for (double v : parse_list(text, "--probes")) out.push_back(vec({v}));
    return out;
  }
  std::string_view rest(text);
  while (true) {
    const auto semi = rest.find(';');
    out.push_back(parse_point(rest.substr(0, semi), n, "--probes"));
    if (semi == std::string_view::npos) return out;
    rest.remove_prefix(semi + 1);
  }
}

int run_check(const CheckOptions& o) {
  const int n = resolve_dimension(o.n, o.ranges);
  const auto& kind = o.kind;
  CheckReport report;
  json extra = json::object();

  const auto grid = [&] { return make_grid(parse_axes(o.ranges, n, "-4:4:41")); };
  const auto field = [&] { return ScalarField::parse(require(o.f, "--f", kind), n); };

  if (kind == "lipschitz") {
    const EpigraphFocal L(field());
    const auto samples = grid();
    Vector lo = samples.front(), hi = samples.back();
    double top = 0.0;
    for (const auto& x : samples) top = std::max(top, L.field(x));
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw = [&] {
      Vector b(n);
      for (int i = 0; i < n; ++i) b[i] = lo[i] + (hi[i] - lo[i]) * unit(rng);
      return SpacePoint(b, -1.0 + (top + 2.0) * unit(rng));
    };
    std::vector<std::pair<SpacePoint, SpacePoint>> pairs;
    for (int k = 0; k < o.pairs; ++k) {
      SpacePoint a = draw();
      SpacePoint b = draw();
      pairs.emplace_back(std::move(a), std::move(b));
    }
    report = lipschitz_check(L, pairs, o.tol.value_or(1e-9));
  } else if (kind == "convexity") {
    const auto G = EquidistantFunction::bisection(field());
    const auto samples = grid();
    std::vector<ConvexityTriple> triples;
    for (std::size_t i = 0; i < samples.size(); ++i)
      for (double lambda : {0.3, 0.7}) triples.push_back({samples[i], samples[samples.size() - 1 - i], lambda});
    report = convexity_check(G, triples, o.tol.value_or(1e-8));
  } else if (kind == "monotonicity") {
    const auto f2 = ScalarField::parse(require(o.f2, "--f2", kind), n);
    report = monotonicity_check(field(), f2, grid(), o.tol.value_or(1e-10));
  } else if (kind == "parameterization") {
    const EquidistantParam P(field());
    report = validate_parameterization(ParamValidationInput::from_param(P, grid()), o.tol.value_or(1e-6));
  } else if (kind == "characterization") {
    const auto G = ScalarField::parse(require(o.G, "--G", kind), n);
    const auto rep = characterize({G, grid()});
    report = rep.as_check_report();
    extra["worst_gradient_norm"] = rep.worst_gradient_norm;
    extra["min_image_separation"] = rep.min_image_separation;
    extra["min_abs_jacobian"] = rep.min_abs_jacobian;
    if (rep.reconstructed) extra["reconstructed_samples"] = rep.reconstructed->size();
  } else if (kind == "envelope") {
    const EquidistantParam P(field());
    const Vector t = parse_point(require(o.t, "--t", kind), n, "--t");
    const auto probes = o.probes.empty() ? std::vector<Vector>{t} : parse_probes(o.probes, n);
    report = envelope_check(P, t, probes, o.tol.value_or(1e-10));
  } else if (kind == "jacobian") {
    const EquidistantParam P(field());
    const Vector t = parse_point(require(o.t, "--t", kind), n, "--t");
    std::vector<Vector> dirs;
    for (int i = 0; i < n; ++i) {
      dirs.push_back(Vector::Unit(n, i));
      dirs.push_back(-Vector::Unit(n, i));
    }
    Vector mixed(n);
    for (int i = 0; i < n; ++i) mixed[i] = i % 2 ? -1.0 : 1.0;
    if (n > 1) dirs.push_back(mixed);
    report = jacobian_bound_check(P, t, dirs, o.tol.value_or(1e-9));
  } else {
    throw UsageError("unknown check '" + kind + "'");
  }

  json doc = report_json(report);
  for (const auto& [key, value] : extra.items()) doc[key] = value;
  if (o.format == "json") {
    std::cout << doc.dump(2) << '\n';
  } else {
    std::cout << report_text(report, extra);
  }
  if (!o.out.empty()) emit(doc.dump(2) + "\n", o.out);
  return report.passed() ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equidistant functions of a hyperplane and an epigraph"};
  app.require_subcommand(1);

  SampleOptions so;
  auto* sample = app.add_subcommand("sample", "Tabulate G (bisect, golden) or the parametric midset (parametric)");
  sample->add_option("--f", so.f, "Generating field f(t1..tn)");
  sample->add_option("--n", so.n, "Dimension")->check(CLI::PositiveNumber);
  sample->add_option("--mode", so.mode)->check(CLI::IsMember({"bisect", "parametric", "golden"}));
  sample->add_option("--range", so.ranges, "MIN:MAX:COUNT, repeat once per axis")->allow_extra_args(false);
  sample->add_option("--tol", so.tol, "Bisection tolerance")->check(CLI::PositiveNumber);
  sample->add_option("--out", so.out, "Output file (default stdout)");
  sample->add_option("--format", so.format)->check(CLI::IsMember({"csv", "json"}));

  GoldenOptions go;
  auto* golden = app.add_subcommand("golden", "Closed-form G for sqrt(|t|^2+1) with error columns");
  golden->add_option("--n", go.n, "Dimension")->check(CLI::PositiveNumber);
  golden->add_option("--range", go.ranges, "MIN:MAX:COUNT, repeat once per axis")->allow_extra_args(false);
  golden->add_flag("--no-bisect", go.no_bisect, "Skip the bisection column");
  golden->add_option("--tol", go.tol, "Bisection tolerance")->check(CLI::PositiveNumber);
  golden->add_option("--out", go.out, "Output file (default stdout)");
  golden->add_option("--format", go.format)->check(CLI::IsMember({"csv", "json"}));

  CheckOptions co;
  auto* check = app.add_subcommand("check", "Run a property check; exit code 1 on failure");
  check->add_option("kind", co.kind, "lipschitz|convexity|monotonicity|parameterization|characterization|envelope|jacobian")
      ->required();
  check->add_option("--f", co.f, "Generating field");
  check->add_option("--f2", co.f2, "Second field (monotonicity)");
  check->add_option("--G", co.G, "Candidate G (characterization)");
  check->add_option("--n", co.n, "Dimension")->check(CLI::PositiveNumber);
  check->add_option("--range", co.ranges, "MIN:MAX:COUNT, repeat once per axis")->allow_extra_args(false);
  check->add_option("--t", co.t, "Parameter point, comma separated");
  check->add_option("--probes", co.probes, "Probe parameters: 0,0.5,2 (n=1) or 0,0;1,1");
  check->add_option("--tol", co.tol, "Check tolerance");
  check->add_option("--pairs", co.pairs, "Random pairs (lipschitz)")->check(CLI::PositiveNumber);
  check->add_option("--seed", co.seed, "Random seed (lipschitz)");
  check->add_option("--out", co.out, "Write the JSON report here");
  check->add_option("--format", co.format)->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*sample) return run_sample(so);
    if (*golden) return run_golden(go);
    return run_check(co);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SyntaxError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
}
