#include "indef/weight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "indef/errors.hpp"

namespace indef {

namespace {

constexpr int kRootGrid = 4096;

double gk_integrate(const std::function<double(double)>& f, double a, double b) {
  if (b <= a) return 0.0;
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-14,
                                                                       &error);
}

}  // namespace

PeriodicWeight::PeriodicWeight(Representation rep, double period, std::vector<double> breaks)
    : rep_(std::move(rep)), period_(period), breaks_(std::move(breaks)) {
  if (!(period_ > 0.0) || !std::isfinite(period_)) {
    throw Error(ErrorCode::InvalidArgument, "weight period must be positive");
  }
  for (std::size_t i = 0; i < breaks_.size(); ++i) {
    if (breaks_[i] < 0.0 || breaks_[i] >= period_) {
      throw Error(ErrorCode::InvalidArgument, "breakpoints must lie in [0, period)");
    }
    if (i > 0 && breaks_[i] <= breaks_[i - 1]) {
      throw Error(ErrorCode::InvalidArgument, "breakpoints must be strictly increasing");
    }
  }
}

PeriodicWeight PeriodicWeight::sin_plus_k(double k, double period) {
  return PeriodicWeight(SinPlusK{k}, period, {});
}

PeriodicWeight PeriodicWeight::piecewise(std::vector<double> breaks, std::vector<double> values,
                                         double period) {
  if (breaks.empty() || breaks.size() != values.size()) {
    throw Error(ErrorCode::InvalidArgument, "piecewise weight needs matching breaks and values");
  }
  auto copy = breaks;
  return PeriodicWeight(Piecewise{std::move(breaks), std::move(values)}, period, std::move(copy));
}

PeriodicWeight PeriodicWeight::constant(double value, double period) {
  return piecewise({0.0}, {value}, period);
}

PeriodicWeight PeriodicWeight::composite(std::function<double(double)> fn, double period,
                                         std::vector<double> breaks, std::string label) {
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  auto shared = std::make_shared<const std::function<double(double)>>(std::move(fn));
  return PeriodicWeight(Composite{std::move(shared), std::move(label)}, period, std::move(breaks));
}

double PeriodicWeight::reduce(double t) const {
  if (t >= 0.0 && t < period_) return t;
  double r = std::fmod(t, period_);
  if (r < 0.0) r += period_;
  if (r >= period_) r -= period_;
  return r;
}

double PeriodicWeight::eval(double t) const {
  const double r = reduce(t);
  return std::visit(
      [&](const auto& form) -> double {
        using F = std::decay_t<decltype(form)>;
        if constexpr (std::is_same_v<F, SinPlusK>) {
          return std::sin(2.0 * std::numbers::pi * r / period_) + form.k;
        } else if constexpr (std::is_same_v<F, Piecewise>) {
          auto it = std::upper_bound(form.breaks.begin(), form.breaks.end(), r);
          if (it == form.breaks.begin()) return form.values.back();
          return form.values[static_cast<std::size_t>(it - form.breaks.begin()) - 1];
        } else {
          return (*form.fn)(r);
        }
      },
      rep_);
}

std::vector<double> PeriodicWeight::breakpoints_between(double t0, double t1) const {
  std::vector<double> out;
  if (breaks_.empty() || !(t1 > t0)) return out;
  const auto k0 = static_cast<long>(std::floor(t0 / period_)) - 1;
  const auto k1 = static_cast<long>(std::ceil(t1 / period_)) + 1;
  for (long k = k0; k <= k1; ++k) {
    for (double b : breaks_) {
      const double tb = b + static_cast<double>(k) * period_;
      if (tb > t0 && tb < t1) out.push_back(tb);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double PeriodicWeight::integral(double s, double t) const {
  if (t < s) return -integral(t, s);
  if (t == s) return 0.0;
  std::vector<double> cuts{s};
  for (double b : breakpoints_between(s, t)) cuts.push_back(b);
  cuts.push_back(t);
  if (const auto* sk = std::get_if<SinPlusK>(&rep_)) {
    const double w = 2.0 * std::numbers::pi / period_;
    return (std::cos(w * s) - std::cos(w * t)) / w + sk->k * (t - s);
  }
  if (std::holds_alternative<Piecewise>(rep_)) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      total += eval(0.5 * (cuts[i] + cuts[i + 1])) * (cuts[i + 1] - cuts[i]);
    }
    return total;
  }
  // Composite: chunks of at most half a period, one oscillation lobe each.
  const double max_chunk = 0.5 * period_;
  const auto f = [this](double x) { return eval(x); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / max_chunk)));
    for (int j = 0; j < n; ++j) {
      const double lo = a + (b - a) * j / n;
      const double hi = j + 1 == n ? b : a + (b - a) * (j + 1) / n;
      // Evaluate strictly inside the piece so a breakpoint at `hi` is seen from the left.
      const auto inner = [&](double x) {
        return f(std::clamp(x, lo, std::nextafter(hi, lo)));
      };
      total += gk_integrate(inner, lo, hi);
    }
  }
  return total;
}

double PeriodicWeight::l1_norm() const {
  std::vector<double> cuts{0.0};
  for (double b : breaks_) cuts.push_back(b);
  for (double r : sign_change_roots(*this)) cuts.push_back(r);
  cuts.push_back(period_);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += std::abs(integral(cuts[i], cuts[i + 1]));
  return total;
}

double eval(const PeriodicWeight& w, double t) { return w.eval(t); }

double integral_over(const PeriodicWeight& w, double s, double t) { return w.integral(s, t); }

std::vector<double> sign_change_roots(const PeriodicWeight& w, double tol) {
  const double T = w.period();
  std::vector<double> pieces{0.0};
  for (double b : w.breakpoints()) {
    if (b > 0.0) pieces.push_back(b);
  }
  pieces.push_back(T);

  std::vector<double> roots;
  for (std::size_t p = 0; p + 1 < pieces.size(); ++p) {
    const double lo = pieces[p];
    const double hi = pieces[p + 1];
    const auto at = [&](double x) { return w.eval(std::clamp(x, lo, std::nextafter(hi, lo))); };
    double x_prev = lo;
    bool nonneg_prev = at(lo) >= 0.0;
    for (int i = 1; i <= kRootGrid; ++i) {
      const double x = lo + (hi - lo) * i / kRootGrid;
      const bool nonneg = at(x) >= 0.0;
      if (nonneg != nonneg_prev) {
        // Bisect keeping `a` on the nonnegative side.
        double a = nonneg_prev ? x_prev : x;
        double b = nonneg_prev ? x : x_prev;
        while (std::abs(b - a) > tol) {
          const double m = 0.5 * (a + b);
          if (m == a || m == b) break;
          if (at(m) >= 0.0) a = m; else b = m;
        }
        roots.push_back(a);
      }
      x_prev = x;
      nonneg_prev = nonneg;
    }
  }
  return roots;
}

std::pair<PeriodicWeight, PeriodicWeight> sign_decompose(const PeriodicWeight& w) {
  const double T = w.period();
  if (const auto* pw = std::get_if<Piecewise>(&w.representation())) {
    std::vector<double> plus, minus;
    for (double v : pw->values) {
      plus.push_back(std::max(v, 0.0));
      minus.push_back(std::max(-v, 0.0));
    }
    return {PeriodicWeight::piecewise(pw->breaks, std::move(plus), T),
            PeriodicWeight::piecewise(pw->breaks, std::move(minus), T)};
  }
  std::vector<double> kinks = w.breakpoints();
  for (double r : sign_change_roots(w)) {
    if (r > 0.0 && r < T) kinks.push_back(r);
  }
  auto plus = PeriodicWeight::composite([w](double t) { return std::max(w.eval(t), 0.0); }, T,
                                        kinks, "positive part");
  auto minus = PeriodicWeight::composite([w](double t) { return std::max(-w.eval(t), 0.0); }, T,
                                         kinks, "negative part");
  return {std::move(plus), std::move(minus)};
}

Interval find_positivity_interval(const PeriodicWeight& w, double min_mass) {
  const double T = w.period();
  std::vector<double> cuts{0.0, T};
  for (double b : w.breakpoints()) cuts.push_back(b);
  for (double r : sign_change_roots(w)) cuts.push_back(r);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // Merge consecutive nonnegative elementary pieces into maximal intervals.
  std::vector<Interval> candidates;
  bool open = false;
  Interval current;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    if (hi - lo <= 0.0) continue;
    const bool nonneg = w.eval(0.5 * (lo + hi)) >= 0.0;
    if (nonneg) {
      if (!open) current = Interval{lo, hi};
      current.hi = hi;
      open = true;
    } else if (open) {
      candidates.push_back(current);
      open = false;
    }
  }
  if (open) candidates.push_back(current);

  const Interval* best = nullptr;
  double best_mass = -std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) {
    const double mass = w.integral(c.lo, c.hi);
    if (mass >= min_mass && mass > best_mass) {
      best = &c;
      best_mass = mass;
    }
  }
  if (best == nullptr) {
    throw Error(ErrorCode::NoPositivityInterval,
                "no interval with a >= 0 carries the requested mass");
  }
  return *best;
}

}  // namespace indef
