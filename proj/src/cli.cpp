#include "indef/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <set>
#include <string>

#include "indef/acceptance.hpp"
#include "indef/errors.hpp"
#include "indef/io.hpp"

namespace indef {

namespace {

struct Flags {
  std::string config;
  std::string out;
  int jobs = 1;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
};

struct Config {
  Json root = Json::object();
  std::uint64_t seed = 0x5EED;

  bool has(const char* key) const { return root.contains(key); }
  const Json& at(const char* key) const {
    if (!has(key)) throw Error(ErrorCode::SchemaError, std::string(key) + ": missing required section");
    return root.at(key);
  }
  Json section(const char* key) const { return has(key) ? root.at(key) : Json::object(); }
};

Config load_config(const Flags& f, bool required) {
  Config c;
  if (f.config.empty()) {
    if (required) throw Error(ErrorCode::SchemaError, "--config is required for this command");
  } else {
    c.root = read_json_file(f.config);
  }
  if (!c.root.is_object()) throw Error(ErrorCode::SchemaError, "config: expected an object");
  static const std::set<std::string> allowed{"seed",  "problem", "thresholds", "solve",
                                             "sweep", "radial",  "verify",     "weight"};
  for (const auto& [key, value] : c.root.items()) {
    if (!allowed.count(key)) throw Error(ErrorCode::SchemaError, key + ": unknown field");
  }
  if (c.has("seed")) {
    if (!c.root.at("seed").is_number_unsigned()) {
      throw Error(ErrorCode::SchemaError, "seed: expected a nonnegative integer");
    }
    c.seed = c.root.at("seed").get<std::uint64_t>();
  }
  if (f.seed) c.seed = *f.seed;
  return c;
}

void write_file(const Flags& f, const std::string& name, const std::string& content) {
  if (f.out.empty()) return;
  std::filesystem::create_directories(f.out);
  std::ofstream os(std::filesystem::path(f.out) / name);
  if (!os) throw Error(ErrorCode::InvalidArgument, "cannot write " + name + " in " + f.out);
  os << content;
}

void check_keys(const Json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, path + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw Error(ErrorCode::SchemaError, path + "." + key + ": unknown field");
  }
}

double get_number(const Json& j, const std::string& path, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw Error(ErrorCode::SchemaError, path + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

std::vector<double> get_numbers(const Json& j, const std::string& path, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_array()) throw Error(ErrorCode::SchemaError, path + "." + key + ": expected an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw Error(ErrorCode::SchemaError, path + "." + key + ": expected numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

MultistartOptions multistart_options(const Json& s, const std::string& path, const Flags& f) {
  MultistartOptions mo;
  mo.jobs = f.jobs;
  mo.shooting.newton_tol = get_number(s, path, "newton_tol", mo.shooting.newton_tol);
  mo.shooting.max_iter = static_cast<int>(get_number(s, path, "max_iter", mo.shooting.max_iter));
  mo.dedup_tol = get_number(s, path, "dedup_tol", mo.dedup_tol);
  if (s.contains("focus")) mo.shooting.focus = interval_from_json(s.at("focus"), path + ".focus");
  if (f.tol) mo.shooting.tol = *f.tol;
  return mo;
}

void print_row(std::ostream& out, const std::string& name, double value) {
  out << std::left << std::setw(20) << name << std::setprecision(10) << value << '\n';
}

int cmd_thresholds(const Flags& f, std::ostream& out) {
  const Config cfg = load_config(f, true);
  const ProblemSpec p = problem_from_json(cfg.at("problem"));
  const ThresholdInputs in = threshold_inputs_from_json(cfg.section("thresholds"));
  const ThresholdReport r = compute_thresholds(p.weight, p.nonlinearity, p.c, in);
  out << "c                   " << r.c << '\n';
  out << "I                   [" << r.I.lo << ", " << r.I.hi << "]\n";
  print_row(out, "eps", r.eps);
  print_row(out, "delta", r.delta);
  print_row(out, "eta", r.eta);
  print_row(out, "core integral", r.core_integral);
  print_row(out, "lambda* (upper)", r.lambda_star_upper);
  print_row(out, "K", r.K);
  print_row(out, "alpha*", r.alpha_star);
  print_row(out, "|a|_1", r.l1_norm);
  print_row(out, "M", r.M);
  print_row(out, "omega*", r.omega_star);
  print_row(out, "D", r.D);
  print_row(out, "lambda_* (lower)", r.lambda_star_lower);
  if (r.mu_threshold) print_row(out, "mu threshold", *r.mu_threshold);
  out << "window consistent   " << (r.window_consistent ? "yes" : "no") << '\n';
  write_file(f, "thresholds.json", dump_json(thresholds_to_json(r)) + "\n");
  return kExitOk;
}

int cmd_solve(const Flags& f, std::ostream& out) {
  const Config cfg = load_config(f, true);
  const ProblemSpec p = problem_from_json(cfg.at("problem"));
  const Json s = cfg.section("solve");
  check_keys(s, "solve", {"u0_grid", "v0_grid", "newton_tol", "max_iter", "dedup_tol", "focus"});
  const auto u0 = s.contains("u0_grid") ? get_numbers(s, "solve", "u0_grid") : default_u0_grid();
  const auto v0 = s.contains("v0_grid") ? get_numbers(s, "solve", "v0_grid") : std::vector<double>{0.0};
  const MultistartResult ms = multistart(p, u0, v0, multistart_options(s, "solve", f));
  Json records = Json::array();
  int k = 0;
  for (const auto& sol : ms.solutions) {
    records.push_back(solution_to_json(sol));
    out << "solution " << k << ": " << to_string(sol.positivity) << ", sup " << std::setprecision(10)
        << sol.sup_norm << ", index " << sol.index << (sol.degenerate ? " (degenerate)" : "") << '\n';
    write_file(f, "trajectory_" + std::to_string(k) + ".csv", trajectory_csv(sol));
    ++k;
  }
  out << "positive solutions: " << ms.count_positive() << ", failed starts: " << ms.failures.size() << '\n';
  const Json doc = {{"problem", problem_to_json(p)},
                    {"solutions", records},
                    {"count_positive", ms.count_positive()},
                    {"failed_starts", ms.failures.size()}};
  write_file(f, "solutions.json", dump_json(doc) + "\n");
  return kExitOk;
}

std::vector<double> sweep_grid(const Json& s) {
  if (s.contains("lambdas")) return get_numbers(s, "sweep", "lambdas");
  const double lo = get_number(s, "sweep", "lambda_min", 1e-4);
  const double hi = get_number(s, "sweep", "lambda_max", 1e4);
  const double n = get_number(s, "sweep", "points", 33);
  if (!(lo > 0.0) || !(hi > lo) || !(n >= 2.0)) {
    throw Error(ErrorCode::SchemaError, "sweep: need 0 < lambda_min < lambda_max and points >= 2");
  }
  std::vector<double> grid;
  const int m = static_cast<int>(n);
  for (int i = 0; i < m; ++i) grid.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (m - 1)));
  return grid;
}

int cmd_sweep(const Flags& f, std::ostream& out) {
  const Config cfg = load_config(f, true);
  const ProblemSpec p = problem_from_json(cfg.at("problem"));
  const Json s = cfg.section("sweep");
  check_keys(s, "sweep", {"lambdas", "lambda_min", "lambda_max", "points", "refine_onset", "u0_grid",
                          "v0_grid", "newton_tol", "max_iter", "dedup_tol", "focus", "certified_window"});
  SweepOptions o;
  o.multistart = multistart_options(s, "sweep", f);
  if (s.contains("u0_grid")) o.u0_grid = get_numbers(s, "sweep", "u0_grid");
  if (s.contains("v0_grid")) o.v0_grid = get_numbers(s, "sweep", "v0_grid");
  if (s.contains("refine_onset")) {
    if (!s.at("refine_onset").is_boolean()) throw Error(ErrorCode::SchemaError, "sweep.refine_onset: expected a boolean");
    o.refine_onset = s.at("refine_onset").get<bool>();
  }
  const bool want_window = !s.contains("certified_window") || s.at("certified_window") == true;
  if (want_window) {
    try {
      const ThresholdReport th =
          compute_thresholds(p.weight, p.nonlinearity, p.c, threshold_inputs_from_json(cfg.section("thresholds")));
      o.certified_window = std::make_pair(th.lambda_star_lower, th.lambda_star_upper);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SchemaError) throw;
      out << "no certified window: " << e.what() << '\n';
    }
  }
  const SweepResult r = lambda_sweep(p, sweep_grid(s), o);
  out << "lambda, count, sup norms\n";
  for (const auto& rec : r.records) {
    out << std::setprecision(8) << rec.lambda << ", " << rec.count_positive;
    for (double v : rec.sup_norms) out << ", " << v;
    out << (rec.refined ? "  (refined)" : "") << '\n';
  }
  if (r.empirical_onset) {
    out << "empirical onset in [" << r.empirical_onset->first << ", " << r.empirical_onset->second << "]\n";
  }
  if (r.certified_window) {
    out << "certified window [" << r.certified_window->first << ", " << r.certified_window->second
        << "], consistent: " << (r.window_consistent() ? "yes" : "no") << '\n';
  }
  write_file(f, "sweep.csv", sweep_to_csv(r));
  write_file(f, "bifurcation.csv", bifurcation_csv(r));
  write_file(f, "sweep.json", dump_json(sweep_to_json(r)) + "\n");
  return kExitOk;
}

int cmd_radial(const Flags& f, std::ostream& out) {
  const Config cfg = load_config(f, true);
  const Json& rj = cfg.at("radial");
  check_keys(rj, "radial", {"N", "R1", "R2", "Q", "lambda", "c", "nonlinearity", "points"});
  const Annulus ann = annulus_from_json(rj);
  if (!rj.contains("Q")) throw Error(ErrorCode::SchemaError, "radial.Q: missing required field");
  const RadialWeight Q = radial_weight_from_json(rj.at("Q"));
  const ReducedProblem red = reduce(ann, Q);
  const QStarReport qs = check_q_star(ann, Q);
  ProblemSpec base;
  base.c = get_number(rj, "radial", "c", 0.0);
  if (rj.contains("nonlinearity")) base.nonlinearity = nonlinearity_from_json(rj.at("nonlinearity"));
  const ProblemSpec p = red.problem(base);
  const double mean_integral = red.weight.integral(0.0, red.T);
  out << "T = " << std::setprecision(12) << red.T << ", integral of a = " << mean_integral
      << ", integral of r^{N-1} Q = " << qs.value << ", negative: " << (qs.holds ? "yes" : "no") << '\n';
  Json doc = {{"annulus", {{"N", ann.N}, {"R1", ann.R1}, {"R2", ann.R2}}},
              {"T", red.T},
              {"weight_integral", mean_integral},
              {"q_star", qs.value},
              {"q_star_holds", qs.holds},
              {"problem", problem_to_json(p)}};
  if (rj.contains("lambda")) {
    const double lam = get_number(rj, "radial", "lambda", 1.0);
    if (!(lam > 0.0)) throw Error(ErrorCode::SchemaError, "radial.lambda: must be positive");
    const int n = static_cast<int>(get_number(rj, "radial", "points", 4001));
    SweepOptions o;
    o.multistart = multistart_options(Json::object(), "radial", f);
    o.multistart.shooting.newton_tol = 1e-12;
    o.refine_onset = false;
    // Reach large lambda by continuation from four decades below.
    std::vector<double> grid;
    for (int i = 0; i <= 16; ++i) grid.push_back(lam * std::pow(10.0, -4.0 + i / 4.0));
    const SweepResult sr = lambda_sweep(p, grid, o);
    Json sols = Json::array();
    int k = 0;
    for (const auto& s : sr.records.back().positive) {
      const RadialProfile prof = lift(s, ann, Q, n);
      Json sj = solution_to_json(s);
      sj["radial_residual"] = prof.residual_abs;
      sj["radial_residual_scaled"] = prof.residual_scaled;
      sj["dU_R1"] = prof.dU_R1;
      sj["dU_R2"] = prof.dU_R2;
      sols.push_back(sj);
      write_file(f, "profile_" + std::to_string(k) + ".csv", profile_csv(prof));
      out << "solution " << k << ": sup " << s.sup_norm << ", radial residual " << prof.residual_abs
          << ", U'(R1) " << prof.dU_R1 << ", U'(R2) " << prof.dU_R2 << '\n';
      ++k;
    }
    doc["lambda"] = lam;
    doc["solutions"] = sols;
  }
  write_file(f, "reduced.json", dump_json(doc) + "\n");
  return kExitOk;
}

int cmd_check_weight(const Flags& f, std::ostream& out) {
  const Config cfg = load_config(f, true);
  PeriodicWeight w = PeriodicWeight::constant(0.0);
  std::optional<Nonlinearity> nl;
  if (cfg.has("weight")) {
    w = weight_from_json(cfg.at("weight"));
  } else {
    const ProblemSpec p = problem_from_json(cfg.at("problem"));
    w = p.weight;
    nl = p.nonlinearity;
  }
  const double T = w.period();
  const double total = w.integral(0.0, T);
  const auto roots = sign_change_roots(w);
  // Cyclic count of sign flips between consecutive roots and jumps.
  std::vector<double> cuts{0.0, T};
  cuts.insert(cuts.end(), roots.begin(), roots.end());
  for (double b : w.breakpoints()) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<int> signs;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = w.eval(0.5 * (cuts[i] + cuts[i + 1]));
    if (a != 0.0) signs.push_back(a > 0.0 ? 1 : -1);
  }
  std::size_t changes = 0;
  for (std::size_t i = 0; i < signs.size(); ++i) {
    if (signs[i] != signs[(i + 1) % signs.size()]) ++changes;
  }
  Json doc = {{"weight", weight_to_json(w)},
              {"period", T},
              {"integral", total},
              {"mean", total / T},
              {"l1_norm", w.l1_norm()},
              {"sign_change_roots", roots},
              {"sign_changes_per_period", changes},
              {"average_negative", total < 0.0}};
  bool ok = total < 0.0;
  try {
    const Interval I = find_positivity_interval(w, 1e-12);
    doc["positivity_interval"] = Json::array({I.lo, I.hi});
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoPositivityInterval) throw;
    doc["positivity_interval"] = nullptr;
    ok = false;
  }
  if (nl) {
    const HypothesisReport h = check_hypotheses(*nl);
    doc["nonlinearity"] = {{"g0_pass", h.g0_pass},
                           {"ginf_pass", h.ginf_pass},
                           {"reg_osc_zero_pass", h.reg_osc_zero_pass},
                           {"reg_osc_inf_pass", h.reg_osc_inf_pass},
                           {"gprime_sup", h.gprime_sup},
                           {"heuristic", h.heuristic}};
  }
  doc["hypotheses_hold"] = ok;
  out << "integral " << std::setprecision(12) << total << ", |a|_1 " << w.l1_norm() << ", sign changes per period "
      << changes << '\n';
  out << (total < 0.0 ? "(a_*) holds" : "(a_*) fails: integral of a is not negative") << '\n';
  if (doc["positivity_interval"].is_null()) out << "no positivity interval\n";
  write_file(f, "weight.json", dump_json(doc) + "\n");
  return ok ? kExitOk : kExitHypothesis;
}

int cmd_verify(const Flags& f, std::ostream& out, std::ostream& err) {
  const Config cfg = load_config(f, false);
  AcceptanceConfig ac;
  ac.seed = cfg.seed;
  ac.jobs = f.jobs;
  if (cfg.has("verify")) ac = acceptance_config_from_json(cfg.root.at("verify"), ac);
  const auto results = run_acceptance(ac, &err);
  bool all = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS" : "FAIL") << " criterion " << r.id << " (" << r.title << "): " << r.detail
        << " [" << std::fixed << std::setprecision(1) << r.seconds << " s]" << std::defaultfloat << '\n';
    all = all && r.passed;
  }
  out << (all ? "all criteria passed" : "some criteria failed") << '\n';
  write_file(f, "acceptance.json", dump_json(acceptance_to_json(results)) + "\n");
  return all ? kExitOk : kExitSuiteFailure;
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::SchemaError:
    case ErrorCode::InvalidArgument:
      return kExitUsage;
    case ErrorCode::AverageNotNegative:
    case ErrorCode::NoPositivityInterval:
    case ErrorCode::PreconditionViolated:
    case ErrorCode::EmptyCore:
    case ErrorCode::NoNegativePart:
    case ErrorCode::UnboundedDerivative:
    case ErrorCode::NonpositiveMinimum:
      return kExitHypothesis;
    default:
      return kExitSuiteFailure;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Periodic and radial solutions of indefinite second-order problems"};
  app.require_subcommand(1);
  Flags flags;
  const auto add_flags = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON config file");
    sub->add_option("--out", flags.out, "output directory for JSON/CSV files");
    sub->add_option("--jobs", flags.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--tol", flags.tol, "integrator tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--seed", flags.seed, "random seed (overrides config)");
  };
  std::map<std::string, std::function<int()>> commands{
      {"thresholds", [&] { return cmd_thresholds(flags, out); }},
      {"solve", [&] { return cmd_solve(flags, out); }},
      {"sweep", [&] { return cmd_sweep(flags, out); }},
      {"radial", [&] { return cmd_radial(flags, out); }},
      {"check-weight", [&] { return cmd_check_weight(flags, out); }},
      {"verify", [&] { return cmd_verify(flags, out, err); }},
  };
  const std::map<std::string, std::string> help{
      {"thresholds", "threshold constants for a problem"},
      {"solve", "multistart census of solutions at one lambda"},
      {"sweep", "solution counts across a lambda grid"},
      {"radial", "annulus reduction and lifted radial profiles"},
      {"check-weight", "sign structure and mean of a weight"},
      {"verify", "run the acceptance suite"},
  };
  for (const auto& [name, text] : help) add_flags(app.add_subcommand(name, text));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return commands.at(name)();
  } catch (const Error& e) {
    err << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSuiteFailure;
  }
}

}  // namespace indef
