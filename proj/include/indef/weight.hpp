#pragma once

#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace indef {

/// Closed subinterval [lo, hi] of one period.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double t) const { return t >= lo && t <= hi; }
};

/// a(t) = sin(2*pi*t/period) + k.
struct SinPlusK {
  double k = 0.0;
};

/// Piecewise-constant weight: values[i] holds on [breaks[i], breaks[i+1]),
/// the last value wraps around to the first break.
struct Piecewise {
  std::vector<double> breaks;
  std::vector<double> values;
};

/// Arbitrary callable weight on one period (used for sign parts and the
/// radially reduced weight).
struct Composite {
  std::shared_ptr<const std::function<double(double)>> fn;
  std::string label;
};

/// T-periodic, piecewise-continuous scalar weight. Immutable once built.
class PeriodicWeight {
 public:
  using Representation = std::variant<SinPlusK, Piecewise, Composite>;

  static PeriodicWeight sin_plus_k(double k, double period = 2.0 * std::numbers::pi);
  static PeriodicWeight piecewise(std::vector<double> breaks, std::vector<double> values,
                                  double period);
  static PeriodicWeight constant(double value, double period = 2.0 * std::numbers::pi);
  /// `breaks` lists the discontinuities (or kinks) of `fn` inside [0, period).
  static PeriodicWeight composite(std::function<double(double)> fn, double period,
                                  std::vector<double> breaks = {}, std::string label = "composite");

  double period() const { return period_; }
  const std::vector<double>& breakpoints() const { return breaks_; }
  const Representation& representation() const { return rep_; }
  bool is_analytic() const { return std::holds_alternative<SinPlusK>(rep_); }

  /// a(t mod T); at a breakpoint the right limit.
  double eval(double t) const;

  /// Integral over [s, t] by adaptive Gauss-Kronrod split at breakpoints.
  double integral(double s, double t) const;
  double mean() const { return integral(0.0, period_) / period_; }
  double l1_norm() const;

  /// Breakpoints lying in the open interval (t0, t1), sorted, periodically replicated.
  std::vector<double> breakpoints_between(double t0, double t1) const;

 private:
  PeriodicWeight(Representation rep, double period, std::vector<double> breaks);
  double reduce(double t) const;

  Representation rep_;
  double period_;
  std::vector<double> breaks_;
};

double eval(const PeriodicWeight& w, double t);
double integral_over(const PeriodicWeight& w, double s, double t);

/// (a+, a-) with a = a+ - a-, both nonnegative.
std::pair<PeriodicWeight, PeriodicWeight> sign_decompose(const PeriodicWeight& w);

/// Sign changes of `w` inside one period, refined by bisection; excludes
/// jump discontinuities at breakpoints.
std::vector<double> sign_change_roots(const PeriodicWeight& w, double tol = 1e-12);

/// Largest-mass maximal interval in [0, T] on which a >= 0 and whose
/// integral is at least `min_mass`. Throws NoPositivityInterval.
Interval find_positivity_interval(const PeriodicWeight& w, double min_mass);

}  // namespace indef
