#include "pklap/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include "pklap/functional.hpp"
#include "pklap/operators.hpp"

namespace pklap::cli {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGradcheckTolerance = 1e-5;

// Budgets for the sampled checks of cmd_check.
constexpr int kInequalitySamples = 1000;
constexpr int kGrowthBudget = 2000;
constexpr int kBoundsBudget = 2000;

/// JSON number, or a string for values JSON cannot hold.
json num(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

json vec_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(num(v[i]));
  return out;
}

void require_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(where + ": '" + key + "' must be finite");
  return x;
}

long long get_integer(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + ": '" + key + "' must be an integer");
  return v.get<long long>();
}

bool get_bool(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(where + ": '" + key + "' must be true or false");
  return v.get<bool>();
}

/// A number (constant over the period) or a list of exactly m numbers.
PeriodicFunction periodic_param(const json& obj, const std::string& key, int m, double min_value,
                                const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  const json& v = obj.at(key);
  std::vector<double> values;
  if (v.is_number()) {
    values.assign(m, v.get<double>());
  } else if (v.is_array()) {
    if (static_cast<int>(v.size()) != m) {
      throw ConfigError(where + ": '" + key + "' must list exactly m values");
    }
    for (const json& x : v) {
      if (!x.is_number()) throw ConfigError(where + ": '" + key + "' entries must be numbers");
      values.push_back(x.get<double>());
    }
  } else {
    throw ConfigError(where + ": '" + key + "' must be a number or a list");
  }
  for (double x : values) {
    if (!std::isfinite(x) || x < min_value) {
      throw ConfigError(where + ": '" + key + "' entries must be >= " + format_double(min_value));
    }
  }
  return PeriodicFunction(values);
}

void parse_solver(const json& s, SolverConfig& cfg) {
  const std::string where = "solver";
  if (!s.is_object()) throw ConfigError("solver must be an object");
  require_keys(s,
               {"starts", "max_iterations", "residual_tol", "dedupe_tol", "deflation_power",
                "deflation_shift", "regularization_eps", "start_radius", "subspace",
                "max_deflation_rounds", "mountain_pass", "test_zero", "path_points", "path_iterations",
                "handoff_tol"},
               where);
  if (s.contains("starts")) cfg.starts = static_cast<int>(get_integer(s, "starts", where));
  if (s.contains("max_iterations")) cfg.max_iterations = static_cast<int>(get_integer(s, "max_iterations", where));
  if (s.contains("residual_tol")) cfg.residual_tol = get_number(s, "residual_tol", where);
  if (s.contains("dedupe_tol")) cfg.dedupe_tol = get_number(s, "dedupe_tol", where);
  if (s.contains("deflation_power")) cfg.deflation_power = get_number(s, "deflation_power", where);
  if (s.contains("deflation_shift")) cfg.deflation_shift = get_number(s, "deflation_shift", where);
  if (s.contains("regularization_eps")) cfg.regularization_eps = get_number(s, "regularization_eps", where);
  if (s.contains("start_radius")) cfg.start_radius = get_number(s, "start_radius", where);
  if (s.contains("max_deflation_rounds")) {
    cfg.max_deflation_rounds = static_cast<int>(get_integer(s, "max_deflation_rounds", where));
  }
  if (s.contains("mountain_pass")) cfg.mountain_pass = get_bool(s, "mountain_pass", where);
  if (s.contains("test_zero")) cfg.test_zero = get_bool(s, "test_zero", where);
  if (s.contains("path_points")) cfg.path_points = static_cast<int>(get_integer(s, "path_points", where));
  if (s.contains("path_iterations")) {
    cfg.path_iterations = static_cast<int>(get_integer(s, "path_iterations", where));
  }
  if (s.contains("handoff_tol")) cfg.handoff_tol = get_number(s, "handoff_tol", where);
  if (s.contains("subspace")) {
    if (!s.at("subspace").is_string()) throw ConfigError("solver: 'subspace' must be a string");
    try {
      cfg.subspace = parse_subspace(s.at("subspace").get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("solver: ") + e.what());
    }
  }
}

json report_json(const CheckReport& r) {
  json out{{"name", r.name},
           {"verdict", to_string(r.verdict)},
           {"samples", r.samples},
           {"margin", num(r.margin)},
           {"seed", r.seed}};
  if (!r.detail.empty()) out["detail"] = r.detail;
  if (r.witness) {
    json point = json::array();
    for (double x : r.witness->point) point.push_back(num(x));
    out["witness"] = {{"k", r.witness->k},
                      {"point", point},
                      {"parameter", num(r.witness->parameter)},
                      {"value", num(r.witness->value)}};
    if (!r.witness->note.empty()) out["witness"]["note"] = r.witness->note;
  }
  return out;
}

bool holds(const std::vector<CheckReport>& reports, const std::string& name) {
  for (const CheckReport& r : reports) {
    if (r.name == name) return r.verdict == Verdict::holds_on_samples;
  }
  return false;
}

bool nearly_equal(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

SolverConfig solver_for(const ProblemConfig& cfg) {
  SolverConfig s = cfg.solver;
  s.seed = cfg.seed;
  s.check_symmetry = true;  // every built-in is even in (u1, u2)
  return s;
}

Route make_route(std::string result, double lo, double hi) {
  Route r;
  r.result = std::move(result);
  r.lambda_lo = lo;
  r.lambda_hi = hi;
  return r;
}

std::string to_json_text(const json& doc) { return doc.dump(2) + "\n"; }

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
    out << contents;
    if (!out.flush()) throw ConfigError("cannot write '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ConfigError("cannot move output into place at '" + path + "'");
  }
}

ProblemConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  require_keys(doc, {"m", "n", "p", "lambda", "nonlinearity", "solver", "seed", "lambda_star", "description"},
               "config");
  ProblemConfig cfg;
  const long long m = get_integer(doc, "m", "config");
  if (m < 2 || m > 100000) throw ConfigError("config: m must be an integer >= 2");
  cfg.m = static_cast<int>(m);
  if (doc.contains("n")) {
    const long long n = get_integer(doc, "n", "config");
    if (n < 1) throw ConfigError("config: n must be >= 1");
    cfg.n = static_cast<int>(n);
  }

  if (!doc.contains("p") || !doc.at("p").is_array()) throw ConfigError("config: 'p' must be a list");
  if (static_cast<int>(doc.at("p").size()) != cfg.m) throw ConfigError("config: 'p' must list exactly m values");
  for (const json& x : doc.at("p")) {
    if (!x.is_number()) throw ConfigError("config: 'p' entries must be numbers");
    const double v = x.get<double>();
    if (!std::isfinite(v) || v < 1.0) throw ConfigError("config: 'p' entries must be >= 1");
    cfg.p.push_back(v);
  }

  cfg.lambda = get_number(doc, "lambda", "config");
  if (!(cfg.lambda > 0.0)) throw ConfigError("config: 'lambda' must be positive");

  if (!doc.contains("nonlinearity") || !doc.at("nonlinearity").is_object()) {
    throw ConfigError("config: 'nonlinearity' must be an object");
  }
  const json& nl = doc.at("nonlinearity");
  require_keys(nl, {"builtin", "params"}, "nonlinearity");
  if (!nl.contains("builtin") || !nl.at("builtin").is_string()) {
    throw ConfigError("nonlinearity: 'builtin' must be a string");
  }
  cfg.builtin = nl.at("builtin").get<std::string>();
  static const std::set<std::string> known{"example1", "example2", "example3", "power"};
  if (!known.count(cfg.builtin)) throw ConfigError("nonlinearity: unknown builtin '" + cfg.builtin + "'");
  if (nl.contains("params")) {
    if (!nl.at("params").is_object()) throw ConfigError("nonlinearity: 'params' must be an object");
    cfg.params = nl.at("params");
  }
  if (cfg.builtin == "power") {
    require_keys(cfg.params, {"a", "b", "s", "r"}, "power params");
  } else {
    require_keys(cfg.params, {}, cfg.builtin + " params");
  }
  if (cfg.n != 1) throw ConfigError("config: built-in nonlinearities require n = 1");

  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<long long>() < 0)) {
      throw ConfigError("config: 'seed' must be a nonnegative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("solver")) parse_solver(doc.at("solver"), cfg.solver);
  cfg.solver.seed = cfg.seed;
  try {
    cfg.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (doc.contains("lambda_star")) {
    const json& ls = doc.at("lambda_star");
    if (!ls.is_object()) throw ConfigError("lambda_star must be an object");
    require_keys(ls, {"r_grid", "samples"}, "lambda_star");
    LambdaStarSettings settings;
    if (!ls.contains("r_grid") || !ls.at("r_grid").is_array() || ls.at("r_grid").empty()) {
      throw ConfigError("lambda_star: 'r_grid' must be a nonempty list");
    }
    for (const json& x : ls.at("r_grid")) {
      if (!x.is_number() || !(x.get<double>() > 0.0)) {
        throw ConfigError("lambda_star: 'r_grid' entries must be positive numbers");
      }
      settings.r_grid.push_back(x.get<double>());
    }
    if (ls.contains("samples")) {
      const long long s = get_integer(ls, "samples", "lambda_star");
      if (s < 1) throw ConfigError("lambda_star: 'samples' must be >= 1");
      settings.samples = static_cast<int>(s);
    }
    cfg.lambda_star = settings;
  }
  return cfg;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("configuration '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

Builtin build_builtin(const ProblemConfig& cfg) {
  try {
    if (cfg.builtin == "power") {
      const double a = get_number(cfg.params, "a", "power params");
      const double b = get_number(cfg.params, "b", "power params");
      return make_power(cfg.m, a, b, periodic_param(cfg.params, "s", cfg.m, 2.0, "power params"),
                        periodic_param(cfg.params, "r", cfg.m, 2.0, "power params"));
    }
    return make_builtin(cfg.builtin, cfg.m);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

Problem build_problem(const ProblemConfig& cfg, const Builtin& builtin) {
  return Problem(ExponentFunction(cfg.p), builtin.nonlinearity, cfg.lambda);
}

Nonlinearity corrupt_derivative(const Nonlinearity& nl) {
  Nonlinearity::Options options;
  options.skip_direct_check = true;
  return Nonlinearity(
      nl.period(), nl.dim(), [nl](int k, const Vec& a, const Vec& b) { return nl.F(k, a, b); },
      [nl](int k, const Vec& a, const Vec& b) -> Vec { return 1.01 * nl.dF_du1(k, a, b); },
      [nl](int k, const Vec& a, const Vec& b) -> Vec { return nl.dF_du2(k, a, b); }, options);
}

std::vector<Route> route(const ProblemConfig& cfg, const Builtin& builtin,
                         const std::vector<CheckReport>& growth, const std::vector<CheckReport>& bounds,
                         const std::optional<Thresholds>& th) {
  std::vector<Route> routes;
  const ExponentFunction p(cfg.p);
  const double pp = p.p_plus();
  auto in_range = [&](Route& r) {
    r.lambda_in_range = cfg.lambda > r.lambda_lo && cfg.lambda < r.lambda_hi;
  };

  if (builtin.growth) {
    const GrowthProfile& g = *builtin.growth;
    const double sm = g.s_minus();
    const double rm = g.r_minus();
    const bool base = holds(growth, "A.4") && holds(growth, "A.5");
    if (sm > pp && !nearly_equal(sm, pp)) {
      Route r = make_route("Case I (s⁻=" + format_double(sm) + " > p⁺=" + format_double(pp) + "), any λ>0", 0.0, kInf);
      r.hypotheses_hold_on_samples = base && ((holds(growth, "A.6.2") && sm <= g.r_plus()) ||
                                              (holds(growth, "A.6.3") && sm <= rm));
      in_range(r);
      routes.push_back(r);
    }
    if (rm > pp && !nearly_equal(rm, pp)) {
      Route r = make_route("Case II (r⁻=" + format_double(rm) + " > p⁺=" + format_double(pp) + "), any λ>0", 0.0, kInf);
      r.hypotheses_hold_on_samples = base && ((holds(growth, "A.6.1") && rm <= g.s_plus()) ||
                                              (holds(growth, "A.6.3") && rm <= sm));
      in_range(r);
      routes.push_back(r);
    }
    if (th) {
      if (nearly_equal(sm, pp) && rm < pp && !nearly_equal(rm, pp)) {
        Route r = make_route("corollary, λ ∈ (λ1, +∞)", th->lambda1, kInf);
        r.hypotheses_hold_on_samples = base && holds(growth, "A.6.2") && sm <= g.r_plus();
        in_range(r);
        routes.push_back(r);
      }
      if (nearly_equal(rm, pp) && sm < pp && !nearly_equal(sm, pp)) {
        Route r = make_route("corollary, λ ∈ (λ2, +∞)", th->lambda2, kInf);
        r.hypotheses_hold_on_samples = base && holds(growth, "A.6.1") && rm <= g.s_plus();
        in_range(r);
        routes.push_back(r);
      }
      if (nearly_equal(sm, pp) && nearly_equal(rm, pp)) {
        Route r = make_route("corollary, λ ∈ (λ3, +∞)", th->lambda3, kInf);
        r.hypotheses_hold_on_samples = base && holds(growth, "A.6.3");
        in_range(r);
        routes.push_back(r);
      }
    }
    if ((sm > pp && !nearly_equal(sm, pp)) || (rm > pp && !nearly_equal(rm, pp))) {
      Route r = make_route("three solutions in Y for λ ∈ (0, λ*)", 0.0, std::numeric_limits<double>::quiet_NaN());
      r.hypotheses_hold_on_samples = holds(growth, "A.4");
      r.note = "λ* is estimated only when the configuration has a lambda_star section";
      routes.push_back(r);
    }
    if (routes.empty()) {
      Route r = make_route("no growth-based result applies (s⁻ and r⁻ both below p⁺)", 0.0, 0.0);
      routes.push_back(r);
    }
    if (!g.alpha_positive()) {
      for (Route& r : routes) {
        r.note += (r.note.empty() ? "" : "; ") + std::string("some α_i(k) = 0, so thresholds are +inf");
      }
    }
  }
  if (builtin.bounds) {
    Route r = make_route("three solutions in Y, two non-zero, for λ in a nonempty open set A", 0.0, kInf);
    r.hypotheses_hold_on_samples = holds(bounds, "A.7") && holds(bounds, "A.8") && holds(bounds, "A.9");
    r.note = "A is not explicit; estimate it with the sweep command";
    routes.push_back(r);
  }
  return routes;
}

int cmd_check(const std::string& config_path, const CheckOptions& opt) {
  const ProblemConfig cfg = load_config(config_path);
  const Builtin builtin = build_builtin(cfg);
  const Problem prob = build_problem(cfg, builtin);
  const ExponentFunction& p = prob.exponent();

  json report;
  report["config"] = {{"m", cfg.m}, {"n", cfg.n}, {"lambda", num(cfg.lambda)},
                      {"builtin", cfg.builtin}, {"seed", cfg.seed}};
  report["p_minus"] = num(p.p_minus());
  report["p_plus"] = num(p.p_plus());

  const XiResult xi = xi_search(cfg.m, cfg.n, p.p_plus());
  report["xi"] = {{"value", num(xi.value)}, {"converged", xi.converged}, {"starts", xi.starts}};
  if (xi.closed_form) report["xi"]["closed_form"] = num(*xi.closed_form);

  std::vector<CheckReport> checks = inequality_suite(cfg.m, cfg.n, kInequalitySamples, cfg.seed, p);
  std::vector<CheckReport> growth;
  std::vector<CheckReport> bounds;
  std::optional<Thresholds> th;
  if (builtin.growth) {
    th = thresholds(prob, *builtin.growth);
    report["thresholds"] = {{"lambda1", num(th->lambda1)},
                            {"lambda2", num(th->lambda2)},
                            {"lambda3", num(th->lambda3)}};
    growth = check_growth(builtin.nonlinearity, *builtin.growth, kGrowthBudget, cfg.seed);
    checks.insert(checks.end(), growth.begin(), growth.end());
  }
  if (builtin.bounds) {
    report["r2"] = num(r2_constant(p, builtin.bounds->rho1));
    bounds = check_bounds(builtin.nonlinearity, *builtin.bounds, kBoundsBudget, cfg.seed);
    checks.insert(checks.end(), bounds.begin(), bounds.end());
  }
  ProbeOptions probe;
  probe.seed = cfg.seed;
  checks.push_back(anticoercivity_probe(prob, probe));

  report["checks"] = json::array();
  for (const CheckReport& c : checks) report["checks"].push_back(report_json(c));

  if (cfg.lambda_star) {
    const LambdaStarResult ls =
        lambda_star_estimate(prob, cfg.lambda_star->r_grid, cfg.lambda_star->samples, cfg.seed);
    json curves = json::array();
    for (const LambdaStarCurve& c : ls.curves) {
      curves.push_back({{"r", num(c.r)},
                        {"samples", c.samples},
                        {"sup_term", num(c.sup_term)},
                        {"inner_inf", num(c.inner_inf)}});
    }
    report["lambda_star"] = {{"estimate", num(ls.estimate)}, {"outer_inf", num(ls.outer_inf)},
                             {"seed", ls.seed}, {"curves", curves}};
  }

  std::vector<Route> routes = route(cfg, builtin, growth, bounds, th);
  report["routing"] = json::array();
  for (Route& r : routes) {
    if (cfg.lambda_star && std::isnan(r.lambda_hi)) {
      r.lambda_hi = report["lambda_star"]["estimate"].is_number()
                        ? report["lambda_star"]["estimate"].get<double>()
                        : kInf;
      r.lambda_in_range = cfg.lambda > 0.0 && cfg.lambda < r.lambda_hi;
      r.note.clear();
    }
    json entry{{"result", r.result},
               {"lambda_interval", {num(r.lambda_lo), num(r.lambda_hi)}},
               {"lambda_in_range", r.lambda_in_range},
               {"hypotheses_hold_on_samples", r.hypotheses_hold_on_samples}};
    if (!r.note.empty()) entry["note"] = r.note;
    report["routing"].push_back(entry);
  }

  write_atomic(opt.output, to_json_text(report));
  std::cout << "wrote " << opt.output << " (" << checks.size() << " checks, " << routes.size()
            << " routes)\n";
  return kSuccess;
}

int cmd_solve(const std::string& config_path, const SolveOptions& opt) {
  ProblemConfig cfg = load_config(config_path);
  if (opt.tol) {
    if (!(*opt.tol > 0.0)) throw ConfigError("--tol must be positive");
    cfg.solver.residual_tol = *opt.tol;
  }
  if (opt.starts) {
    if (*opt.starts < 1) throw ConfigError("--starts must be >= 1");
    cfg.solver.starts = *opt.starts;
  }
  if (opt.seed) cfg.seed = *opt.seed;
  const Builtin builtin = build_builtin(cfg);
  const Problem prob = build_problem(cfg, builtin);
  const SolverConfig solver = solver_for(cfg);
  if (prob.exponent().p_minus() < 2.0 && !(solver.regularization_eps > 0.0)) {
    throw ConfigError("p(k) < 2 requires solver.regularization_eps > 0");
  }

  const SolutionSet set = find_multiple(prob, solver);

  std::ostringstream values;
  values << "solution_id,k,component,value\n";
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    const PeriodicSequence& u = set.records[i].u;
    for (int k = 1; k <= u.period(); ++k) {
      for (int c = 0; c < u.dim(); ++c) {
        values << i << ',' << k << ',' << (c + 1) << ',' << format_double(u.at(k, c)) << '\n';
      }
    }
  }

  json summary;
  summary["config"] = {{"m", cfg.m}, {"n", cfg.n}, {"lambda", num(cfg.lambda)},
                       {"builtin", cfg.builtin}, {"seed", cfg.seed},
                       {"subspace", to_string(solver.subspace)}, {"residual_tol", num(solver.residual_tol)}};
  int nontrivial = 0;
  summary["solutions"] = json::array();
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    const SolutionRecord& r = set.records[i];
    const double norm = euclidean_norm(r.u);
    if (norm > solver.dedupe_tol) ++nontrivial;
    summary["solutions"].push_back({{"id", i},
                                    {"J_m", num(r.action_value)},
                                    {"residual_norm", num(r.residual_norm)},
                                    {"norm", num(norm)},
                                    {"morse_index", r.morse_index},
                                    {"classification", to_string(r.classification)},
                                    {"in_Y", r.in_Y},
                                    {"regularized", r.regularized},
                                    {"method", to_string(set.provenance[i].method)},
                                    {"start_index", set.provenance[i].start_index},
                                    {"warm_start", set.provenance[i].warm_start}});
  }
  summary["solution_count"] = set.records.size();
  summary["nontrivial_count"] = nontrivial;
  summary["discrepancies"] = json::array();
  for (const SolutionRecord& r : set.discrepancies) {
    summary["discrepancies"].push_back(
        {{"values", vec_json(r.u.flat())}, {"residual_norm", num(r.residual_norm)}, {"J_m", num(r.action_value)}});
  }
  summary["symmetry"] = {{"checked", set.symmetry_checked}, {"failures", set.symmetry_failures}};
  summary["attempts"] = set.attempts;
  summary["failed_attempts"] = set.failures;

  write_atomic(opt.values_output, values.str());
  write_atomic(opt.summary_output, to_json_text(summary));
  std::cout << "wrote " << opt.values_output << " and " << opt.summary_output << " ("
            << set.records.size() << " solutions)\n";
  return set.records.empty() ? kFailed : kSuccess;
}

int cmd_sweep(const std::string& config_path, const SweepOptions& opt) {
  if (!(opt.lambda_min > 0.0)) throw ConfigError("--lambda-min must be positive");
  if (!(opt.lambda_min < opt.lambda_max)) throw ConfigError("--lambda-min must be below --lambda-max");
  if (opt.steps < 1) throw ConfigError("--steps must be >= 1");
  const ProblemConfig cfg = load_config(config_path);
  const Builtin builtin = build_builtin(cfg);
  const Problem prob = build_problem(cfg, builtin);
  const SolverConfig solver = solver_for(cfg);
  if (prob.exponent().p_minus() < 2.0 && !(solver.regularization_eps > 0.0)) {
    throw ConfigError("p(k) < 2 requires solver.regularization_eps > 0");
  }

  const SweepResult sweep = lambda_sweep(prob, geometric_grid(opt.lambda_min, opt.lambda_max, opt.steps), solver);

  std::ostringstream out;
  out << "lambda,count,nontrivial_count,min_J_m\n";
  bool any = false;
  for (std::size_t i = 0; i < sweep.lambda_grid.size(); ++i) {
    out << format_double(sweep.lambda_grid[i]) << ',' << sweep.counts[i] << ','
        << sweep.nontrivial_counts[i] << ',' << format_double(sweep.min_action[i]) << '\n';
    any = any || sweep.counts[i] > 0;
  }
  out << "# A_estimate:";
  if (sweep.A_estimate.empty()) out << " none";
  for (const LambdaInterval& iv : sweep.A_estimate) {
    out << " [" << format_double(iv.lo) << "," << format_double(iv.hi) << "]";
  }
  out << '\n';
  for (std::size_t i = 0; i < sweep.lambda_grid.size(); ++i) {
    if (!sweep.sets[i].discrepancies.empty()) {
      out << "# discrepancies at lambda=" << format_double(sweep.lambda_grid[i]) << ": "
          << sweep.sets[i].discrepancies.size() << '\n';
    }
    if (!sweep.sets[i].symmetry_failures.empty()) {
      out << "# symmetry failures at lambda=" << format_double(sweep.lambda_grid[i]) << ": "
          << sweep.sets[i].symmetry_failures.size() << '\n';
    }
    if (!sweep.failures[i].empty()) {
      out << "# failure at lambda=" << format_double(sweep.lambda_grid[i]) << ": " << sweep.failures[i] << '\n';
    }
  }
  write_atomic(opt.output, out.str());
  std::cout << "wrote " << opt.output << " (" << sweep.lambda_grid.size() << " rows, "
            << sweep.A_estimate.size() << " A intervals)\n";
  return any ? kSuccess : kFailed;
}

int cmd_gradcheck(const std::string& config_path, const GradcheckOptions& opt) {
  if (opt.points < 1) throw ConfigError("--points must be >= 1");
  if (!(opt.step > 0.0)) throw ConfigError("--step must be positive");
  const ProblemConfig cfg = load_config(config_path);
  const Builtin builtin = build_builtin(cfg);
  if (*std::min_element(cfg.p.begin(), cfg.p.end()) <= 1.0) {
    throw ConfigError("gradcheck needs p(k) > 1 everywhere");
  }
  const Nonlinearity nl = opt.corrupt ? corrupt_derivative(builtin.nonlinearity) : builtin.nonlinearity;
  const Problem prob(ExponentFunction(cfg.p), nl, cfg.lambda);

  const GradientCheck gc = gradient_check(prob, opt.points, opt.step, cfg.seed);
  const bool passed = gc.max_relative_error <= kGradcheckTolerance;
  json report{{"points", gc.points},
              {"step", num(opt.step)},
              {"tolerance", num(kGradcheckTolerance)},
              {"max_relative_error", num(gc.max_relative_error)},
              {"passed", passed}};
  report["worst"] = {{"index", gc.worst_index},
                     {"point", vec_json(gc.worst_point)},
                     {"analytic", vec_json(gc.worst_analytic)},
                     {"numeric", vec_json(gc.worst_numeric)}};
  write_atomic(opt.output, to_json_text(report));
  if (!passed) {
    std::cerr << "gradcheck failed: max relative error " << format_double(gc.max_relative_error)
              << " at sample " << gc.worst_index << " (details in " << opt.output << ")\n";
    return kFailed;
  }
  std::cout << "gradcheck passed: max relative error " << format_double(gc.max_relative_error) << "\n";
  return kSuccess;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"pklap: periodic solutions of anisotropic discrete p(k)-Laplacian problems"};
  app.require_subcommand(1);

  std::string config;
  CheckOptions check_opt;
  SolveOptions solve_opt;
  SweepOptions sweep_opt;
  GradcheckOptions grad_opt;
  double tol = 0.0;
  int starts = 0;
  std::uint64_t seed = 0;

  auto* check = app.add_subcommand("check", "Evaluate constants, hypotheses and theorem routing");
  check->add_option("config", config, "Configuration file")->required();
  check->add_option("-o,--output", check_opt.output, "Report file")->capture_default_str();

  auto* solve = app.add_subcommand("solve", "Search for several periodic solutions");
  solve->add_option("config", config, "Configuration file")->required();
  auto* tol_opt = solve->add_option("--tol", tol, "Residual tolerance");
  auto* starts_opt = solve->add_option("--starts", starts, "Number of random starts");
  auto* seed_opt = solve->add_option("--seed", seed, "Random seed");
  solve->add_option("--values", solve_opt.values_output, "Values file (CSV)")->capture_default_str();
  solve->add_option("--summary", solve_opt.summary_output, "Summary file (JSON)")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Count solutions over a geometric λ grid");
  sweep->add_option("config", config, "Configuration file")->required();
  sweep->add_option("--lambda-min", sweep_opt.lambda_min, "Smallest λ")->required();
  sweep->add_option("--lambda-max", sweep_opt.lambda_max, "Largest λ")->required();
  sweep->add_option("--steps", sweep_opt.steps, "Number of grid points")->required();
  sweep->add_option("-o,--output", sweep_opt.output, "Sweep file (CSV)")->capture_default_str();

  auto* grad = app.add_subcommand("gradcheck", "Compare the gradient with finite differences");
  grad->add_option("config", config, "Configuration file")->required();
  grad->add_option("--points", grad_opt.points, "Number of random points")->capture_default_str();
  grad->add_option("--step", grad_opt.step, "Relative difference step")->capture_default_str();
  grad->add_option("-o,--output", grad_opt.output, "Report file (JSON)")->capture_default_str();
  grad->add_flag("--corrupt-derivative", grad_opt.corrupt)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalidInput;
  }

  try {
    if (*check) return cmd_check(config, check_opt);
    if (*solve) {
      if (*tol_opt) solve_opt.tol = tol;
      if (*starts_opt) solve_opt.starts = starts;
      if (*seed_opt) solve_opt.seed = seed;
      return cmd_solve(config, solve_opt);
    }
    if (*sweep) return cmd_sweep(config, sweep_opt);
    if (*grad) return cmd_gradcheck(config, grad_opt);
  } catch (const ConfigError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}

}  // namespace pklap::cli
