#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <variant>

namespace indef {

/// g(s) = arctan(s^alpha).
struct ArctanPow {
  double alpha = 2.0;
};

/// g(s) = s^2 / (1 + s^2).
struct RationalBump {};

/// g(s) = s^p.
struct Power {
  double p = 1.0;
};

/// Caller-provided g with optional exact derivative.
struct UserPair {
  std::shared_ptr<const std::function<double(double)>> g;
  std::shared_ptr<const std::function<double(double)>> gprime;  // may be null
  std::string label = "user";
};

/// The nonlinearity g: [0, inf) -> [0, inf). Immutable.
class Nonlinearity {
 public:
  using Form = std::variant<ArctanPow, RationalBump, Power, UserPair>;

  static Nonlinearity arctan_pow(double alpha);
  static Nonlinearity rational_bump();
  static Nonlinearity power(double p);
  static Nonlinearity user(std::function<double(double)> g,
                           std::function<double(double)> gprime = nullptr,
                           std::string label = "user");

  const Form& form() const { return form_; }
  bool derivative_available() const;
  std::string describe() const;

  /// Throws DomainError for s < 0.
  double g(double s) const;
  /// Exact derivative when available, else central difference with
  /// h = max(1e-6, 1e-6 s). Throws DomainError for s < 0.
  double gprime(double s) const;

 private:
  explicit Nonlinearity(Form form) : form_(std::move(form)) {}
  Form form_;
};

double eval_g(const Nonlinearity& nl, double s);
double eval_gprime(const Nonlinearity& nl, double s);

struct ProbeConfig {
  double small_lo = 1e-6;
  double small_hi = 1e-2;
  double large_lo = 1e2;
  double large_hi = 1e6;
  int points = 41;
  double ratio_tol = 0.05;
  double osc_tol = 0.2;
};

/// Finite-grid probes of the asymptotic hypotheses. These are heuristics:
/// a pass means no gross violation was seen on the grid, not a proof.
struct HypothesisReport {
  double g0_probe = 0.0;
  double ginf_probe = 0.0;
  /// max |g(ws)/g(s) - 1| for w in {0.95, 1.05}; the outer pair {0.9, 1.1}
  /// is used only to confirm the deviation shrinks as w -> 1.
  double reg_osc_zero = 0.0;
  double reg_osc_inf = 0.0;
  double reg_osc_zero_outer = 0.0;
  double reg_osc_inf_outer = 0.0;
  double gprime_sup = 0.0;
  bool g0_pass = false;
  bool ginf_pass = false;
  bool reg_osc_zero_pass = false;
  bool reg_osc_inf_pass = false;
  bool heuristic = true;
};

HypothesisReport check_hypotheses(const Nonlinearity& nl, const ProbeConfig& grids = {});

/// sup |g'| over [lo, hi]; hi may be +infinity (grid capped at 1e8).
/// Throws UnboundedDerivative when grid values exceed 1e12 or, for an
/// infinite hi, when the maximum sits at the cap.
double sup_gprime_on(const Nonlinearity& nl, double lo,
                     double hi = std::numeric_limits<double>::infinity());

/// min g over [lo, hi] with 0 < lo <= hi. Throws NonpositiveMinimum.
double min_g_on(const Nonlinearity& nl, double lo, double hi);

}  // namespace indef
