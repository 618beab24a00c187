#include "indef/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "indef/errors.hpp"

namespace indef {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Derivative of s^q at s >= 0 scaled by q, with the conventional value at 0.
double power_slope(double q, double s) {
  if (s > 0.0) return q * std::pow(s, q - 1.0);
  if (q > 1.0) return 0.0;
  if (q == 1.0) return 1.0;
  return kInf;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  xs.front() = lo;
  xs.back() = hi;
  return xs;
}

// Golden-section maximisation of f on [a, b].
template <class F>
double golden_max(F&& f, double a, double b, int iters = 100) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < iters && (b - a) > 1e-15 * std::max(1.0, std::abs(b)); ++i) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return std::max({fc, fd, f(a), f(b)});
}

void require_nonnegative(double s) {
  if (!(s >= 0.0)) {
    throw Error(ErrorCode::DomainError, "g is only defined on [0, inf); use the extended map");
  }
}

}  // namespace

Nonlinearity Nonlinearity::arctan_pow(double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "arctan_pow exponent must be positive");
  return Nonlinearity(ArctanPow{alpha});
}

Nonlinearity Nonlinearity::rational_bump() { return Nonlinearity(RationalBump{}); }

Nonlinearity Nonlinearity::power(double p) {
  if (!(p > 0.0)) throw Error(ErrorCode::InvalidArgument, "power exponent must be positive");
  return Nonlinearity(Power{p});
}

Nonlinearity Nonlinearity::user(std::function<double(double)> g, std::function<double(double)> gprime,
                                std::string label) {
  UserPair pair;
  pair.g = std::make_shared<const std::function<double(double)>>(std::move(g));
  if (gprime) pair.gprime = std::make_shared<const std::function<double(double)>>(std::move(gprime));
  pair.label = std::move(label);
  return Nonlinearity(std::move(pair));
}

bool Nonlinearity::derivative_available() const {
  if (const auto* u = std::get_if<UserPair>(&form_)) return u->gprime != nullptr;
  return true;
}

std::string Nonlinearity::describe() const {
  std::ostringstream os;
  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, ArctanPow>) os << "arctan(s^" << f.alpha << ")";
        else if constexpr (std::is_same_v<F, RationalBump>) os << "s^2/(1+s^2)";
        else if constexpr (std::is_same_v<F, Power>) os << "s^" << f.p;
        else os << f.label;
      },
      form_);
  return os.str();
}

double Nonlinearity::g(double s) const {
  require_nonnegative(s);
  return std::visit(
      [s](const auto& f) -> double {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, ArctanPow>) {
          return std::atan(std::pow(s, f.alpha));
        } else if constexpr (std::is_same_v<F, RationalBump>) {
          if (s <= 1.0) return s * s / (1.0 + s * s);
          return 1.0 / (1.0 + 1.0 / (s * s));
        } else if constexpr (std::is_same_v<F, Power>) {
          return std::pow(s, f.p);
        } else {
          return (*f.g)(s);
        }
      },
      form_);
}

double Nonlinearity::gprime(double s) const {
  require_nonnegative(s);
  return std::visit(
      [this, s](const auto& f) -> double {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, ArctanPow>) {
          const double slope = power_slope(f.alpha, s);
          if (!std::isfinite(slope)) return slope;
          const double sa = std::pow(s, f.alpha);
          return slope / (1.0 + sa * sa);
        } else if constexpr (std::is_same_v<F, RationalBump>) {
          if (s <= 1.0) {
            const double d = 1.0 + s * s;
            return 2.0 * s / (d * d);
          }
          const double d = 1.0 + 1.0 / (s * s);
          return 2.0 / (s * s * s * d * d);
        } else if constexpr (std::is_same_v<F, Power>) {
          return power_slope(f.p, s);
        } else {
          if (f.gprime) return (*f.gprime)(s);
          const double h = std::max(1e-6, 1e-6 * s);
          if (s >= h) return (g(s + h) - g(s - h)) / (2.0 * h);
          // One-sided second-order difference at the left edge of the domain.
          return (-3.0 * g(s) + 4.0 * g(s + h) - g(s + 2.0 * h)) / (2.0 * h);
        }
      },
      form_);
}

double eval_g(const Nonlinearity& nl, double s) { return nl.g(s); }

double eval_gprime(const Nonlinearity& nl, double s) { return nl.gprime(s); }

double sup_gprime_on(const Nonlinearity& nl, double lo, double hi) {
  if (!(lo >= 0.0) || hi < lo) throw Error(ErrorCode::InvalidArgument, "need 0 <= lo <= hi");
  constexpr double kCap = 1e8;
  constexpr double kLimit = 1e12;
  const auto abs_gp = [&](double s) { return std::abs(nl.gprime(s)); };
  const auto check = [&](double v) {
    if (!std::isfinite(v) || v > kLimit) {
      throw Error(ErrorCode::UnboundedDerivative, "|g'| exceeds 1e12 on the probe grid");
    }
    return v;
  };
  if (hi == lo) return check(abs_gp(lo));

  const double top = std::min(hi, kCap);
  std::vector<double> xs;
  if (lo == 0.0) {
    xs.push_back(0.0);
    auto tail = log_grid(std::min(1e-8, 0.5 * top), top, 4000);
    xs.insert(xs.end(), tail.begin(), tail.end());
  } else {
    xs = log_grid(lo, std::max(top, lo), 4000);
  }
  std::size_t best = 0;
  double best_val = -1.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double v = check(abs_gp(xs[i]));
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  if (std::isinf(hi) && best + 1 == xs.size()) {
    throw Error(ErrorCode::UnboundedDerivative, "|g'| still growing at the probe cap 1e8");
  }
  const double a = xs[best == 0 ? 0 : best - 1];
  const double b = xs[std::min(best + 1, xs.size() - 1)];
  if (b > a) best_val = std::max(best_val, check(golden_max(abs_gp, a, b)));
  return best_val;
}

double min_g_on(const Nonlinearity& nl, double lo, double hi) {
  if (!(lo > 0.0) || hi < lo) throw Error(ErrorCode::InvalidArgument, "need 0 < lo <= hi");
  double result = 0.0;
  if (hi == lo) {
    result = nl.g(lo);
  } else {
    const auto xs = log_grid(lo, hi, 2000);
    std::vector<double> ys(xs.size());
    bool increasing = true;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      ys[i] = nl.g(xs[i]);
      if (i > 0 && ys[i] < ys[i - 1]) increasing = false;
    }
    if (increasing) {
      result = ys.front();
    } else {
      const auto it = std::min_element(ys.begin(), ys.end());
      const auto i = static_cast<std::size_t>(it - ys.begin());
      const double a = xs[i == 0 ? 0 : i - 1];
      const double b = xs[std::min(i + 1, xs.size() - 1)];
      const double refined = -golden_max([&](double s) { return -nl.g(s); }, a, b);
      result = std::min(*it, refined);
    }
  }
  if (!(result > 0.0)) {
    throw Error(ErrorCode::NonpositiveMinimum, "g vanishes on the requested interval");
  }
  return result;
}

HypothesisReport check_hypotheses(const Nonlinearity& nl, const ProbeConfig& grids) {
  HypothesisReport r;
  const auto small = log_grid(grids.small_lo, grids.small_hi, grids.points);
  const auto large = log_grid(grids.large_lo, grids.large_hi, grids.points);

  const auto ratio_max = [&](const std::vector<double>& xs) {
    double m = 0.0;
    for (double s : xs) m = std::max(m, std::abs(nl.g(s) / s));
    return m;
  };
  const auto osc_max = [&](const std::vector<double>& xs, std::initializer_list<double> omegas) {
    double m = 0.0;
    for (double s : xs) {
      const double gs = nl.g(s);
      if (!(gs > 0.0)) return kInf;
      for (double w : omegas) m = std::max(m, std::abs(nl.g(w * s) / gs - 1.0));
    }
    return m;
  };

  r.g0_probe = ratio_max(small);
  r.ginf_probe = ratio_max(large);
  r.reg_osc_zero = osc_max(small, {0.95, 1.05});
  r.reg_osc_inf = osc_max(large, {0.95, 1.05});
  r.reg_osc_zero_outer = osc_max(small, {0.9, 1.1});
  r.reg_osc_inf_outer = osc_max(large, {0.9, 1.1});
  try {
    r.gprime_sup = sup_gprime_on(nl, 0.0);
  } catch (const Error&) {
    r.gprime_sup = kInf;
  }

  r.g0_pass = r.g0_probe < grids.ratio_tol;
  r.ginf_pass = r.ginf_probe < grids.ratio_tol;
  r.reg_osc_zero_pass = r.reg_osc_zero < grids.osc_tol && r.reg_osc_zero <= r.reg_osc_zero_outer;
  r.reg_osc_inf_pass = r.reg_osc_inf < grids.osc_tol && r.reg_osc_inf <= r.reg_osc_inf_outer;
  return r;
}

}  // namespace indef
