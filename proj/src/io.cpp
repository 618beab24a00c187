#include "indef/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "indef/errors.hpp"

namespace indef {

namespace {

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SchemaError, path + ": " + what);
}

/// Field access on one JSON object with unknown-key detection.
class Fields {
 public:
  Fields(const Json& j, std::string path, std::set<std::string> allowed)
      : j_(j), path_(std::move(path)), allowed_(std::move(allowed)) {
    if (!j_.is_object()) schema_fail(path_, "expected an object");
    for (const auto& [key, value] : j_.items()) {
      if (!allowed_.count(key)) schema_fail(path_ + "." + key, "unknown field");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string sub(const std::string& key) const { return path_ + "." + key; }

  const Json& at(const std::string& key) const {
    if (!has(key)) schema_fail(sub(key), "missing required field");
    return j_.at(key);
  }

  double number(const std::string& key) const {
    const Json& v = at(key);
    if (!v.is_number()) schema_fail(sub(key), "expected a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }
  std::optional<double> opt_number(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  long integer(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    const Json& v = at(key);
    if (!v.is_number_integer()) schema_fail(sub(key), "expected an integer");
    return v.get<long>();
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const Json& v = at(key);
    if (!v.is_boolean()) schema_fail(sub(key), "expected a boolean");
    return v.get<bool>();
  }

  std::string string(const std::string& key) const {
    const Json& v = at(key);
    if (!v.is_string()) schema_fail(sub(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) const {
    const Json& v = at(key);
    if (!v.is_array()) schema_fail(sub(key), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) schema_fail(sub(key), "expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> allowed_;
};

std::string type_of(const Json& j, const std::string& path) {
  if (!j.is_object()) schema_fail(path, "expected an object");
  if (!j.contains("type")) schema_fail(path + ".type", "missing required field");
  if (!j.at("type").is_string()) schema_fail(path + ".type", "expected a string");
  return j.at("type").get<std::string>();
}

/// Library InvalidArgument during construction is a schema problem here.
template <class F>
auto build(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::DomainError) {
      schema_fail(path, e.what());
    }
    throw;
  }
}

void dump_value(const Json& j, int indent, int depth, std::string& out) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map: sorted keys
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump_value(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        dump_value(v, indent, depth + 1, out);
      }
      newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      out += std::isfinite(j.get<double>()) ? format_double(j.get<double>()) : "null";
      return;
    default:
      out += j.dump();
  }
}

Json interval_json(const Interval& I) { return Json::array({I.lo, I.hi}); }

Json optional_number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  // Keep floats recognisable as floats after a round trip.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string dump_json(const Json& j, int indent) {
  std::string out;
  dump_value(j, indent, 0, out);
  return out;
}

Interval interval_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    schema_fail(path, "expected [lo, hi]");
  }
  Interval I{j[0].get<double>(), j[1].get<double>()};
  if (!(I.lo < I.hi)) schema_fail(path, "need lo < hi");
  return I;
}

PeriodicWeight weight_from_json(const Json& j) {
  const std::string path = "weight";
  const std::string type = type_of(j, path);
  const double two_pi = 2.0 * std::numbers::pi;
  if (type == "sin_plus_k") {
    Fields f(j, path, {"type", "k", "period"});
    return build(path, [&] { return PeriodicWeight::sin_plus_k(f.number("k"), f.number("period", two_pi)); });
  }
  if (type == "piecewise") {
    Fields f(j, path, {"type", "breaks", "values", "period"});
    return build(path, [&] {
      return PeriodicWeight::piecewise(f.numbers("breaks"), f.numbers("values"), f.number("period"));
    });
  }
  if (type == "constant") {
    Fields f(j, path, {"type", "value", "period"});
    return build(path,
                 [&] { return PeriodicWeight::constant(f.number("value"), f.number("period", two_pi)); });
  }
  schema_fail(path + ".type", "unknown weight type '" + type + "'");
}

Nonlinearity nonlinearity_from_json(const Json& j) {
  const std::string path = "nonlinearity";
  const std::string type = type_of(j, path);
  if (type == "arctan_pow") {
    Fields f(j, path, {"type", "alpha"});
    return build(path, [&] { return Nonlinearity::arctan_pow(f.number("alpha")); });
  }
  if (type == "rational_bump") {
    Fields f(j, path, {"type"});
    return Nonlinearity::rational_bump();
  }
  if (type == "power") {
    Fields f(j, path, {"type", "p"});
    return build(path, [&] { return Nonlinearity::power(f.number("p")); });
  }
  schema_fail(path + ".type", "unknown nonlinearity type '" + type + "'");
}

ProblemSpec problem_from_json(const Json& j) {
  Fields f(j, "problem", {"c", "lambda", "alpha", "theta", "bc", "weight", "nonlinearity"});
  ProblemSpec p;
  p.weight = weight_from_json(f.at("weight"));
  p.nonlinearity = nonlinearity_from_json(f.at("nonlinearity"));
  p.c = f.number("c", 0.0);
  p.lambda = f.number("lambda", 1.0);
  p.alpha = f.number("alpha", 0.0);
  p.theta = f.number("theta", 1.0);
  if (f.has("bc")) {
    const std::string bc = f.string("bc");
    if (bc == "periodic") {
      p.bc = BoundaryKind::Periodic;
    } else if (bc == "neumann") {
      p.bc = BoundaryKind::Neumann;
    } else {
      schema_fail("problem.bc", "expected 'periodic' or 'neumann'");
    }
  }
  build("problem", [&] {
    p.validate();
    return 0;
  });
  return p;
}

RadialWeight radial_weight_from_json(const Json& j) {
  const std::string path = "radial.Q";
  const std::string type = type_of(j, path);
  if (type == "log_sin_plus_k") {
    Fields f(j, path, {"type", "k", "power", "omega"});
    return RadialWeight::log_sin_plus_k(f.number("k"), f.number("power", 0.0), f.number("omega", 1.0));
  }
  if (type == "constant") {
    Fields f(j, path, {"type", "value"});
    return RadialWeight::constant(f.number("value"));
  }
  if (type == "polynomial") {
    Fields f(j, path, {"type", "coeffs"});
    auto coeffs = f.numbers("coeffs");
    if (coeffs.empty()) schema_fail(f.sub("coeffs"), "needs at least one coefficient");
    return RadialWeight::polynomial(std::move(coeffs));
  }
  schema_fail(path + ".type", "unknown radial weight type '" + type + "'");
}

Annulus annulus_from_json(const Json& j) {
  if (!j.is_object()) schema_fail("radial", "expected an object");
  Annulus a;
  const Json& n = j.contains("N") ? j.at("N") : Json();
  if (!n.is_number_integer()) schema_fail("radial.N", "expected an integer");
  a.N = n.get<int>();
  for (const char* key : {"R1", "R2"}) {
    if (!j.contains(key)) schema_fail(std::string("radial.") + key, "missing required field");
    if (!j.at(key).is_number()) schema_fail(std::string("radial.") + key, "expected a number");
  }
  a.R1 = j.at("R1").get<double>();
  a.R2 = j.at("R2").get<double>();
  build("radial", [&] {
    a.validate();
    return 0;
  });
  return a;
}

ThresholdInputs threshold_inputs_from_json(const Json& j) {
  Fields f(j, "thresholds", {"rho", "I", "eps", "optimize_eps", "mu_lambda"});
  ThresholdInputs in;
  in.rho = f.number("rho", 1.0);
  if (f.has("I")) in.I = interval_from_json(f.at("I"), f.sub("I"));
  in.eps = f.opt_number("eps");
  in.optimize_eps = f.boolean("optimize_eps", false);
  in.mu_lambda = f.opt_number("mu_lambda");
  return in;
}

Json weight_to_json(const PeriodicWeight& w) {
  return std::visit(
      [&](const auto& r) -> Json {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, SinPlusK>) {
          return {{"type", "sin_plus_k"}, {"k", r.k}, {"period", w.period()}};
        } else if constexpr (std::is_same_v<R, Piecewise>) {
          return {{"type", "piecewise"}, {"breaks", r.breaks}, {"values", r.values}, {"period", w.period()}};
        } else {
          return {{"type", "composite"}, {"label", r.label}, {"period", w.period()}};
        }
      },
      w.representation());
}

Json nonlinearity_to_json(const Nonlinearity& nl) {
  return std::visit(
      [](const auto& f) -> Json {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, ArctanPow>) {
          return {{"type", "arctan_pow"}, {"alpha", f.alpha}};
        } else if constexpr (std::is_same_v<F, RationalBump>) {
          return {{"type", "rational_bump"}};
        } else if constexpr (std::is_same_v<F, Power>) {
          return {{"type", "power"}, {"p", f.p}};
        } else {
          return {{"type", "user"}, {"label", f.label}};
        }
      },
      nl.form());
}

Json problem_to_json(const ProblemSpec& p) {
  return {{"c", p.c},
          {"lambda", p.lambda},
          {"alpha", p.alpha},
          {"theta", p.theta},
          {"bc", p.bc == BoundaryKind::Periodic ? "periodic" : "neumann"},
          {"weight", weight_to_json(p.weight)},
          {"nonlinearity", nonlinearity_to_json(p.nonlinearity)}};
}

Json solution_to_json(const Solution& s) {
  return {{"lambda", s.problem.lambda},
          {"bc", s.problem.bc == BoundaryKind::Periodic ? "periodic" : "neumann"},
          {"u0", s.initial_state.u},
          {"v0", s.initial_state.v},
          {"sup_norm", s.sup_norm},
          {"min_u", s.min_u},
          {"max_on_I", optional_number(s.max_on_I)},
          {"residual", s.residual},
          {"index", s.index},
          {"jacobian_det", s.jacobian_det},
          {"degenerate", s.degenerate},
          {"positivity", std::string(to_string(s.positivity))}};
}

Json thresholds_to_json(const ThresholdReport& r) {
  Json j = {{"c", r.c},
            {"period", r.period},
            {"rho", r.rho},
            {"I", interval_json(r.I)},
            {"eps", r.eps},
            {"sigma0", r.sigma0},
            {"tau0", r.tau0},
            {"delta", r.delta},
            {"eta", r.eta},
            {"core_integral", r.core_integral},
            {"lambda_star_upper", r.lambda_star_upper},
            {"K", r.K},
            {"alpha_star", r.alpha_star},
            {"l1_norm", r.l1_norm},
            {"neg_integral", r.neg_integral},
            {"M", r.M},
            {"omega_star", r.omega_star},
            {"D", r.D},
            {"lambda_star_lower", r.lambda_star_lower},
            {"window_consistent", r.window_consistent}};
  j["mu_threshold"] = r.mu_threshold ? Json(*r.mu_threshold) : Json(nullptr);
  return j;
}

Json sweep_to_json(const SweepResult& r) {
  Json records = Json::array();
  for (const auto& rec : r.records) {
    Json mo = Json::array();
    for (double m : rec.max_on_I) mo.push_back(optional_number(m));
    records.push_back({{"lambda", rec.lambda},
                       {"count_positive", rec.count_positive},
                       {"sup_norms", rec.sup_norms},
                       {"indices", rec.indices},
                       {"max_on_I", mo},
                       {"failures", rec.failures},
                       {"refined", rec.refined}});
  }
  const auto pair_json = [](const std::optional<std::pair<double, double>>& p) {
    return p ? Json::array({p->first, p->second}) : Json(nullptr);
  };
  return {{"lambda_grid", r.lambda_grid},
          {"records", records},
          {"empirical_onset", pair_json(r.empirical_onset)},
          {"certified_window", pair_json(r.certified_window)},
          {"max_count", r.max_count()},
          {"window_consistent", r.window_consistent()}};
}

Json ledger_to_json(const LedgerReport& r) { return Json::parse(r.to_json()); }

std::string sweep_to_csv(const SweepResult& r) {
  const int m = r.max_count();
  std::ostringstream os;
  os << "lambda,count";
  for (int i = 1; i <= m; ++i) os << ",norm_" << i;
  for (int i = 1; i <= m; ++i) os << ",index_" << i;
  os << '\n';
  for (const auto& rec : r.records) {
    os << format_double(rec.lambda) << ',' << rec.count_positive;
    for (int i = 0; i < m; ++i) {
      os << ',';
      if (i < rec.count_positive) os << format_double(rec.sup_norms[static_cast<std::size_t>(i)]);
    }
    for (int i = 0; i < m; ++i) {
      os << ',';
      if (i < rec.count_positive) os << rec.indices[static_cast<std::size_t>(i)];
    }
    os << '\n';
  }
  return os.str();
}

std::string bifurcation_csv(const SweepResult& r) {
  std::ostringstream os;
  os << "lambda,branch,sup_norm,index\n";
  for (const auto& rec : r.records) {
    for (std::size_t i = 0; i < rec.sup_norms.size(); ++i) {
      os << format_double(rec.lambda) << ',' << i + 1 << ',' << format_double(rec.sup_norms[i]) << ','
         << rec.indices[i] << '\n';
    }
  }
  return os.str();
}

std::string trajectory_csv(const Solution& s, int n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 samples");
  const double T = s.problem.period();
  std::ostringstream os;
  os << "t,u,v\n";
  for (int i = 0; i < n; ++i) {
    const double t = T * i / (n - 1);
    const State x = s.trajectory.at(t);
    os << format_double(t) << ',' << format_double(x.u) << ',' << format_double(x.v) << '\n';
  }
  return os.str();
}

std::string profile_csv(const RadialProfile& p) {
  std::ostringstream os;
  os << "r,U\n";
  for (std::size_t i = 0; i < p.r.size(); ++i) os << format_double(p.r[i]) << ',' << format_double(p.U[i]) << '\n';
  return os.str();
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::SchemaError, "cannot open config '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, "config '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace indef
