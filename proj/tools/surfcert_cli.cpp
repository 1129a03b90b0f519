// Batch front end: identity suites, Gauss-Bonnet quadrature and field smoothing.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "surfcert/approx.hpp"
#include "surfcert/bochner.hpp"
#include "surfcert/error.hpp"
#include "surfcert/expression.hpp"
#include "surfcert/integrate.hpp"
#include "surfcert/operators.hpp"
#include "surfcert/parallel.hpp"
#include "surfcert/surfaces.hpp"

using namespace surfcert;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

constexpr double kNormalizeFloor = 1e-6;

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::config_error, what); }

std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) config_error("bad number '" + item + "' in " + what);
    out.push_back(x);
  }
  return out;
}

struct SurfaceChoice {
  std::string name;
  SurfaceKind kind = SurfaceKind::torus;
  std::vector<double> params;
};

SurfaceChoice parse_surface(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  static const std::map<std::string, std::pair<SurfaceKind, std::vector<double>>> table = {
      {"sphere", {SurfaceKind::sphere, {1.0}}},
      {"torus", {SurfaceKind::torus, {2.0, 1.0}}},
      {"clifford", {SurfaceKind::clifford_torus, {1.0}}},
      {"clifford_torus", {SurfaceKind::clifford_torus, {1.0}}},
      {"ellipsoid", {SurfaceKind::ellipsoid, {1.0, 1.3, 0.7}}},
  };
  const auto it = table.find(name);
  if (it == table.end()) config_error("unknown surface '" + name + "'");
  SurfaceChoice c{std::string(to_string(it->second.first)), it->second.first, it->second.second};
  if (colon != std::string::npos) c.params = parse_numbers(text.substr(colon + 1), "--surface");
  return c;
}

struct FieldChoice {
  std::string text;
  std::optional<TangentField> field;
};

FieldChoice parse_field(const std::string& text) {
  if (text == "du") return {text, fields::coordinate_u()};
  if (text == "dv") return {text, fields::coordinate_v()};
  if (text == "kinked") return {text, fields::kinked()};
  if (text.find(',') == std::string::npos) config_error("unknown field '" + text + "'");
  return {text, parse_field_expression(text)};
}

std::array<int, 2> parse_grid(const std::string& text) {
  const auto x = text.find('x');
  int nu = 0, nv = 0;
  try {
    std::size_t a = 0, b = 0;
    if (x == std::string::npos) throw std::invalid_argument(text);
    nu = std::stoi(text.substr(0, x), &a);
    nv = std::stoi(text.substr(x + 1), &b);
    if (a != x || b != text.size() - x - 1) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    config_error("grid must look like NUxNV, got '" + text + "'");
  }
  if (nu < 4 || nv < 4) config_error("grid resolution must be at least 4x4");
  return {nu, nv};
}

DerivativeMode parse_backend(const std::string& text) {
  if (text == "analytic") return DerivativeMode::analytic();
  if (text == "fd") return DerivativeMode::finite_difference();
  if (text.rfind("fd:", 0) == 0) {
    const auto h = parse_numbers(text.substr(3), "--backend");
    if (h.size() != 1 || !(h[0] > 0.0)) config_error("fd step must be one positive number");
    return DerivativeMode::finite_difference(h[0]);
  }
  config_error("backend must be analytic, fd or fd:H, got '" + text + "'");
}

std::map<std::string, double> parse_tolerances(const std::vector<std::string>& items,
                                               const std::vector<std::string>& known) {
  std::map<std::string, double> out;
  for (const std::string& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) config_error("--tol expects NAME=VALUE, got '" + item + "'");
    const std::string name = item.substr(0, eq);
    if (std::find(known.begin(), known.end(), name) == known.end()) config_error("unknown tolerance '" + name + "'");
    const auto v = parse_numbers(item.substr(eq + 1), "--tol");
    if (v.size() != 1 || !(v[0] >= 0.0)) config_error("tolerance " + name + " must be a non-negative number");
    out[name] = v[0];
  }
  return out;
}

struct Options {
  std::string surface = "torus";
  std::string field;
  std::string grid = "64x64";
  std::string backend = "analytic";
  std::vector<std::string> tolerances;
  int max_degree = 16;
  std::string out;
  std::string format = "json";
  std::string coeffs;
};

struct RunConfig {
  Options raw;
  SurfaceChoice surface_choice;
  Surface surface;
  FieldChoice field;
  std::array<int, 2> grid{};
  std::map<std::string, double> tolerances;
};

RunConfig resolve(const Options& o, const std::vector<std::string>& tolerance_names) {
  const SurfaceChoice sc = parse_surface(o.surface);
  const FieldChoice fc = o.field.empty() ? FieldChoice{} : parse_field(o.field);
  const auto grid = parse_grid(o.grid);
  const DerivativeMode mode = parse_backend(o.backend);
  auto tols = parse_tolerances(o.tolerances, tolerance_names);
  if (o.format != "json" && o.format != "csv") config_error("format must be json or csv");
  Surface s = [&] {
    try {
      return make_surface(sc.kind, sc.params, mode);
    } catch (const Error& e) {
      config_error(e.what());
    }
  }();
  return RunConfig{o, sc, std::move(s), fc, grid, std::move(tols)};
}

json config_echo(const RunConfig& c, const std::string& command) {
  json backend = {{"kind", c.surface.mode().is_analytic() ? "analytic" : "fd"}};
  if (!c.surface.mode().is_analytic()) backend["step"] = c.surface.mode().step();
  json tol = json::object();
  for (const auto& [k, v] : c.tolerances) tol[k] = v;
  return {{"command", command},
          {"surface", {{"name", c.surface_choice.name},
                       {"params", std::vector<double>(c.surface.params().begin(), c.surface.params().end())},
                       {"ambient_dim", c.surface.ambient_dim()}}},
          {"field", c.field.text.empty() ? json(nullptr) : json(c.field.text)},
          {"grid", {c.grid[0], c.grid[1]}},
          {"backend", backend},
          {"tolerance_overrides", tol},
          {"threads", thread_count()}};
}

json point_json(ChartPoint p) { return {{"u", p.u}, {"v", p.v}}; }

// ---------------------------------------------------------------------------
// verify

const std::vector<std::string> kVerifyChecks = {"bochner", "trace_identity", "divergence_square",
                                                "curvature_identity"};

struct NodeOutcome {
  std::size_t index = 0;
  std::vector<IdentityResidual> residuals;
  std::optional<ErrorKind> error;
  std::string message;
};

struct CheckSummary {
  std::string name;
  double tolerance = 0.0;
  double sup = 0.0;
  double mean = 0.0;
  std::size_t nodes = 0;
  std::size_t worst = 0;
  std::size_t failed = 0;
  bool pass = true;
};

struct Output {
  json report;
  std::vector<std::vector<std::string>> csv_rows;
  std::vector<std::string> csv_header;
  bool pass = false;
};

Output cmd_verify(const RunConfig& c) {
  if (!c.field.field) config_error("verify needs --field");
  const Surface& s = c.surface;
  const GridSampling grid = chart_grid(s, c.grid[0], c.grid[1]);
  const auto nodes = guarded_indices(s, grid);
  const auto tol = [&](const std::string& name) {
    const auto it = c.tolerances.find(name);
    return it != c.tolerances.end() ? it->second : identity_tolerance(s);
  };
  const TangentField unit = normalize_field(s, *c.field.field, kNormalizeFloor);

  std::vector<NodeOutcome> outcomes(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t n) {
    NodeOutcome& out = outcomes[n];
    out.index = nodes[n];
    const ChartPoint p = grid.points[out.index];
    try {
      out.residuals.push_back(bochner_residual_at(s, unit, p, tol("bochner")));
      out.residuals.push_back(trace_identity_residual_at(s, unit, p, tol("trace_identity")));
      out.residuals.push_back(divergence_square_residual_at(s, unit, p, tol("divergence_square")));
      out.residuals.push_back(curvature_identity_residual_at(s, unit, p, tol("curvature_identity")));
    } catch (const Error& e) {
      out.residuals.clear();
      out.error = e.kind();
      out.message = e.what();
    }
  });

  std::vector<CheckSummary> checks;
  for (const std::string& name : kVerifyChecks) checks.push_back({name, tol(name)});
  json failures = json::array();
  std::size_t evaluated = 0;
  for (const NodeOutcome& o : outcomes) {
    const ChartPoint p = grid.points[o.index];
    if (o.error) {
      failures.push_back({{"i", o.index / static_cast<std::size_t>(grid.nv)},
                          {"j", o.index % static_cast<std::size_t>(grid.nv)},
                          {"point", point_json(p)},
                          {"error", std::string(to_string(*o.error))},
                          {"message", o.message}});
      continue;
    }
    ++evaluated;
    for (std::size_t k = 0; k < checks.size(); ++k) {
      CheckSummary& cs = checks[k];
      const IdentityResidual& r = o.residuals[k];
      // NaN residuals count as failures and as the worst node.
      if (cs.nodes == 0 || !(r.value <= cs.sup)) {
        cs.sup = r.value;
        cs.worst = o.index;
      }
      cs.mean += r.value;
      cs.nodes += 1;
      if (!r.pass) {
        cs.failed += 1;
        cs.pass = false;
      }
    }
  }

  Output out;
  json jchecks = json::array();
  bool pass = failures.empty() && evaluated > 0;
  for (CheckSummary& cs : checks) {
    if (cs.nodes > 0) cs.mean /= static_cast<double>(cs.nodes);
    if (cs.nodes == 0) cs.pass = false;
    pass = pass && cs.pass;
    json j = {{"name", cs.name},     {"tolerance", cs.tolerance}, {"sup", cs.sup},
              {"mean", cs.mean},     {"nodes", cs.nodes},         {"failed_nodes", cs.failed},
              {"pass", cs.pass}};
    j["worst_node"] = cs.nodes > 0 ? point_json(grid.points[cs.worst]) : json(nullptr);
    jchecks.push_back(j);
  }
  out.report["checks"] = jchecks;
  out.report["guarded_nodes"] = nodes.size();
  out.report["failures"] = failures;
  out.pass = pass;
  if (!failures.empty()) {
    std::cerr << failures.size() << " of " << nodes.size() << " nodes failed:\n";
    for (const auto& f : failures) {
      std::cerr << "  node (" << f["i"].get<std::size_t>() << ", " << f["j"].get<std::size_t>() << ") "
                << f["message"].get<std::string>() << "\n";
    }
  }

  out.csv_header = {"i", "j", "u", "v", "check", "value", "tolerance", "pass", "error"};
  for (const NodeOutcome& o : outcomes) {
    const ChartPoint p = grid.points[o.index];
    const std::string i = std::to_string(o.index / static_cast<std::size_t>(grid.nv));
    const std::string j = std::to_string(o.index % static_cast<std::size_t>(grid.nv));
    std::ostringstream su, sv;
    su.precision(17);
    sv.precision(17);
    su << p.u;
    sv << p.v;
    if (o.error) {
      out.csv_rows.push_back({i, j, su.str(), sv.str(), "", "", "", "false", std::string(to_string(*o.error))});
      continue;
    }
    for (const IdentityResidual& r : o.residuals) {
      std::ostringstream val, t;
      val.precision(17);
      t.precision(17);
      val << r.value;
      t << r.tolerance;
      out.csv_rows.push_back({i, j, su.str(), sv.str(), r.name, val.str(), t.str(), r.pass ? "true" : "false", ""});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// gauss-bonnet

json integral_json(const IntegralResult& r) {
  return {{"value", r.value}, {"grid", {r.nu, r.nv}}, {"rule", r.rule}, {"estimated_error", r.estimated_error}};
}

Output cmd_gauss_bonnet(const RunConfig& c) {
  const Surface& s = c.surface;
  const GridSampling grid = chart_grid(s, c.grid[0], c.grid[1]);
  const IntegralResult k = curvature_integral(s, grid);
  const ChiEstimate chi = chi_from_integral(k.value);
  const bool determinate = chi.margin < kChiMargin;

  Output out;
  out.report["curvature_integral"] = integral_json(k);
  out.report["chi"] = {{"raw", chi.raw}, {"rounded", chi.rounded}, {"margin", chi.margin},
                       {"determinate", determinate}};
  if (s.known_chi()) out.report["known_chi"] = *s.known_chi();
  out.report["torus"] = determinate ? json(chi.rounded == 0) : json(nullptr);
  out.pass = determinate;
  if (!determinate) {
    std::cerr << to_string(ErrorKind::chi_indeterminate) << ": raw chi " << std::setprecision(17) << chi.raw
              << " is " << chi.margin << " from the nearest integer\n";
  }
  out.csv_header = {"quantity", "value"};
  const auto num = [](double x) {
    std::ostringstream o;
    o.precision(17);
    o << x;
    return o.str();
  };
  out.csv_rows = {{"curvature_integral", num(k.value)},
                  {"estimated_error", num(k.estimated_error)},
                  {"chi_raw", num(chi.raw)},
                  {"chi_rounded", std::to_string(chi.rounded)},
                  {"chi_margin", num(chi.margin)}};

  if (c.field.field) {
    const auto it = c.tolerances.find("divergence_theorem");
    const double tol = it != c.tolerances.end() ? it->second : 1e-8;
    json d;
    try {
      const TangentField unit = normalize_field(s, *c.field.field, kNormalizeFloor);
      const IntegralResult r = divergence_theorem_residual(s, construct_y_field(s, unit), grid);
      d = integral_json(r);
      d["tolerance"] = tol;
      d["pass"] = std::abs(r.value) < tol;
      out.pass = out.pass && std::abs(r.value) < tol;
      out.csv_rows.push_back({"divergence_theorem", num(r.value)});
    } catch (const Error& e) {
      d = {{"error", std::string(to_string(e.kind()))}, {"message", e.what()}, {"pass", false}};
      out.pass = false;
      std::cerr << e.what() << "\n";
    }
    out.report["divergence_theorem"] = d;
  }
  return out;
}

// ---------------------------------------------------------------------------
// smooth

json smoothed_json(const SmoothedFieldReport& r) {
  json attempts = json::array();
  for (const DegreeAttempt& a : r.attempts) {
    attempts.push_back(
        {{"degree", a.degree}, {"sup_error", a.sup_error}, {"basis_size", a.basis_size}, {"rank", a.rank}});
  }
  return {{"final_degree", r.final_degree},
          {"sup_error", r.sup_error},
          {"min_tangential_norm", r.min_tangential_norm},
          {"target", r.target},
          {"max_orthogonality_defect", r.max_orthogonality_defect},
          {"pass", r.pass},
          {"attempts", attempts}};
}

Output cmd_smooth(const RunConfig& c) {
  if (!c.field.field) config_error("smooth needs --field");
  if (c.raw.max_degree < 0) config_error("--max-degree must be non-negative");
  SmoothOptions opts;
  opts.max_degree = c.raw.max_degree;
  opts.fit_grid = c.grid;
  opts.verify_grid = {4 * c.grid[0], 4 * c.grid[1]};

  Output out;
  SmoothedFieldReport report;
  std::optional<PolynomialField> poly;
  try {
    SmoothedField sf = smooth_field(c.surface, *c.field.field, opts);
    report = sf.report;
    poly = std::move(sf.polynomial);
    out.pass = report.pass;
  } catch (const BudgetNotMet& e) {
    report = e.report();
    out.pass = false;
    std::cerr << e.what() << "\n";
  }
  out.report["smoothing"] = smoothed_json(report);
  out.report["smoothing"]["verify_grid"] = {opts.verify_grid[0], opts.verify_grid[1]};
  if (poly && !c.raw.coeffs.empty()) {
    std::ofstream f(c.raw.coeffs);
    if (!f) config_error("cannot write " + c.raw.coeffs);
    write_polynomial_field(f, *poly);
    out.report["coefficients_file"] = c.raw.coeffs;
  }
  out.csv_header = {"degree", "basis_size", "rank", "sup_error"};
  for (const DegreeAttempt& a : report.attempts) {
    std::ostringstream e;
    e.precision(17);
    e << a.sup_error;
    out.csv_rows.push_back({std::to_string(a.degree), std::to_string(a.basis_size), std::to_string(a.rank), e.str()});
  }
  return out;
}

// ---------------------------------------------------------------------------

void emit(const Output& out, const json& config, const Options& o, double seconds) {
  std::ostringstream text;
  if (o.format == "json") {
    json report;
    report["schema"] = 1;
    report["config"] = config;
    for (auto it = out.report.begin(); it != out.report.end(); ++it) report[it.key()] = it.value();
    report["pass"] = out.pass;
    report["timings"] = {{"total_seconds", seconds}};
    text << report.dump(2) << "\n";
  } else {
    const auto line = [&text](const std::vector<std::string>& cells) {
      for (std::size_t k = 0; k < cells.size(); ++k) text << (k ? "," : "") << cells[k];
      text << "\n";
    };
    line(out.csv_header);
    for (const auto& row : out.csv_rows) line(row);
  }
  if (o.out.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream f(o.out);
    if (!f) config_error("cannot write " + o.out);
    f << text.str();
  }
}

void add_common(CLI::App* cmd, Options& o, bool field_required) {
  cmd->add_option("--surface", o.surface, "sphere, torus, clifford or ellipsoid, with optional :p1,p2,...");
  auto* field = cmd->add_option("--field", o.field, "du, dv, kinked or \"expr_u,expr_v\"");
  if (field_required) field->required();
  cmd->add_option("--grid", o.grid, "NUxNV");
  cmd->add_option("--backend", o.backend, "analytic, fd or fd:H");
  cmd->add_option("--tol", o.tolerances, "NAME=VALUE override, repeatable");
  cmd->add_option("--out", o.out, "Write the report here instead of stdout");
  cmd->add_option("--format", o.format, "json or csv");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical certification of the Bochner-technique hairy ball argument"};
  app.require_subcommand(1);
  Options o;
  auto* verify = app.add_subcommand("verify", "Pointwise identity suite over a guarded grid");
  add_common(verify, o, true);
  auto* gb = app.add_subcommand("gauss-bonnet", "Euler characteristic by quadrature");
  add_common(gb, o, false);
  auto* smooth = app.add_subcommand("smooth", "Polynomial smoothing of a continuous field");
  add_common(smooth, o, true);
  smooth->add_option("--max-degree", o.max_degree, "Highest total degree to try");
  smooth->add_option("--coeffs", o.coeffs, "Write the fitted coefficient file here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    std::string command;
    std::vector<std::string> tolerance_names;
    if (verify->parsed()) {
      command = "verify";
      tolerance_names = kVerifyChecks;
    } else if (gb->parsed()) {
      command = "gauss-bonnet";
      tolerance_names = {"divergence_theorem"};
    } else {
      command = "smooth";
    }
    const RunConfig c = resolve(o, tolerance_names);
    Output out = command == "verify" ? cmd_verify(c) : command == "gauss-bonnet" ? cmd_gauss_bonnet(c) : cmd_smooth(c);
    json config = config_echo(c, command);
    if (command == "smooth") config["max_degree"] = o.max_degree;
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    emit(out, config, o, seconds);
    return out.pass ? kExitPass : kExitFail;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::config_error ? kExitConfig : kExitFail;
  }
}
