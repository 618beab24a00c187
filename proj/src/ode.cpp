#include "indef/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "indef/errors.hpp"

namespace indef {

void ProblemSpec::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::InvalidArgument, "alpha must be nonnegative");
  }
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "theta must lie in (0, 1]");
  }
  if (!std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "c must be finite");
}

ProblemSpec ProblemSpec::with_lambda(double value) const {
  ProblemSpec out = *this;
  out.lambda = value;
  return out;
}

double State::norm_inf() const { return std::max(std::abs(u), std::abs(v)); }

double Matrix2::norm_inf() const {
  return std::max(std::abs(m[0]) + std::abs(m[1]), std::abs(m[2]) + std::abs(m[3]));
}

Matrix2 operator*(const Matrix2& a, const Matrix2& b) {
  Matrix2 r;
  r(0, 0) = a(0, 0) * b(0, 0) + a(0, 1) * b(1, 0);
  r(0, 1) = a(0, 0) * b(0, 1) + a(0, 1) * b(1, 1);
  r(1, 0) = a(1, 0) * b(0, 0) + a(1, 1) * b(1, 0);
  r(1, 1) = a(1, 0) * b(0, 1) + a(1, 1) * b(1, 1);
  return r;
}

State DenseStep::at(double t) const {
  const double th = h > 0.0 ? std::clamp((t - t0) / h, 0.0, 1.0) : 0.0;
  const double th1 = 1.0 - th;
  std::array<double, 2> out{};
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& r = coef[i];
    out[i] = r[0] + th * (r[1] + th1 * (r[2] + th * (r[3] + th1 * r[4])));
  }
  return {out[0], out[1]};
}

State Trajectory::at(double t) const {
  if (steps.empty()) return states.front();
  if (t <= steps.front().t0) return states.front();
  if (t >= times.back()) return states.back();
  auto it = std::upper_bound(steps.begin(), steps.end(), t,
                             [](double x, const DenseStep& s) { return x < s.t0; });
  return std::prev(it)->at(t);
}

std::vector<State> Trajectory::sample(int n) const {
  std::vector<State> out;
  out.reserve(static_cast<std::size_t>(n));
  const double a = t_begin();
  const double b = t_end();
  for (int i = 0; i < n; ++i) out.push_back(at(n == 1 ? a : a + (b - a) * i / (n - 1)));
  return out;
}

std::pair<double, double> Trajectory::u_range() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : states) {
    lo = std::min(lo, s.u);
    hi = std::max(hi, s.u);
  }
  for (const auto& st : steps) {
    const double u = st.at(st.t0 + 0.5 * st.h).u;
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  return {lo, hi};
}

double Trajectory::max_u_on(double lo, double hi) const {
  double m = -std::numeric_limits<double>::infinity();
  const int n = 2001;
  for (int i = 0; i < n; ++i) m = std::max(m, at(lo + (hi - lo) * i / (n - 1)).u);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] >= lo && times[i] <= hi) m = std::max(m, states[i].u);
  }
  return m;
}

void Trajectory::append(const Trajectory& next) {
  if (times.empty()) {
    *this = next;
    return;
  }
  times.insert(times.end(), next.times.begin() + 1, next.times.end());
  states.insert(states.end(), next.states.begin() + 1, next.states.end());
  if (!fundamental.empty() && !next.fundamental.empty()) {
    fundamental.insert(fundamental.end(), next.fundamental.begin() + 1, next.fundamental.end());
  }
  steps.insert(steps.end(), next.steps.begin(), next.steps.end());
}

double extended_rhs(const ProblemSpec& p, double t, double s) {
  if (s >= 0.0) return p.theta * p.lambda * p.weight.eval(t) * p.nonlinearity.g(s) + p.alpha;
  if (p.left_branch) return p.left_branch(s) + p.alpha;
  return -s + p.alpha;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

enum class Branch { Right, Left };

constexpr int kMaxEvents = 100000;

template <std::size_t D>
using Vec = std::array<double, D>;

template <std::size_t D>
class Flow {
 public:
  explicit Flow(const ProblemSpec& p) : p_(p) {}

  void set_segment(double lo, double hi) {
    lo_ = lo;
    hi_left_ = std::nextafter(hi, lo);
  }

  Vec<D> operator()(double t, const Vec<D>& y, Branch b) const {
    const double u = y[0];
    const double v = y[1];
    double f = 0.0;
    double df = 0.0;
    if (b == Branch::Right) {
      const double a = p_.weight.eval(std::clamp(t, lo_, hi_left_));
      const double s = std::max(u, 0.0);
      const double scale = p_.theta * p_.lambda * a;
      f = scale * p_.nonlinearity.g(s) + p_.alpha;
      if constexpr (D == 6) df = scale * p_.nonlinearity.gprime(s);
    } else if (p_.left_branch) {
      f = p_.left_branch(u) + p_.alpha;
      if constexpr (D == 6) {
        const double h = 1e-7 * std::max(1.0, std::abs(u));
        df = (p_.left_branch(u + h) - p_.left_branch(u - h)) / (2.0 * h);
      }
    } else {
      f = -u + p_.alpha;
      df = -1.0;
    }
    Vec<D> dy{};
    dy[0] = v;
    dy[1] = -p_.c * v - f;
    if constexpr (D == 6) {
      // M' = [[0, 1], [-df, -c]] M, stored row-major in y[2..5].
      dy[2] = y[4];
      dy[3] = y[5];
      dy[4] = -df * y[2] - p_.c * y[4];
      dy[5] = -df * y[3] - p_.c * y[5];
    }
    return dy;
  }

  Branch initial_branch(double t, double u, double v) const {
    if (u > 0.0) return Branch::Right;
    if (u < 0.0) return Branch::Left;
    return branch_after_zero(t, v);
  }

  Branch branch_after_zero(double, double v) const {
    if (v > 0.0) return Branch::Right;
    if (v < 0.0) return Branch::Left;
    // At rest on u = 0 the acceleration is -alpha.
    return p_.alpha > 0.0 ? Branch::Left : Branch::Right;
  }

 private:
  const ProblemSpec& p_;
  double lo_ = -std::numeric_limits<double>::infinity();
  double hi_left_ = std::numeric_limits<double>::infinity();
};

template <std::size_t D>
struct StepResult {
  Vec<D> y5{};
  Vec<D> k7{};
  Vec<D> err{};
  DenseStep dense;
};

template <std::size_t D>
StepResult<D> dp_step(const Flow<D>& f, double t, const Vec<D>& y, const Vec<D>& k1, double h,
                      Branch b) {
  Vec<D> tmp{};
  const auto stage = [&](auto&& combine) {
    for (std::size_t i = 0; i < D; ++i) tmp[i] = y[i] + h * combine(i);
    return tmp;
  };
  const Vec<D> k2 = f(t + c2 * h, stage([&](std::size_t i) { return a21 * k1[i]; }), b);
  const Vec<D> k3 =
      f(t + c3 * h, stage([&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; }), b);
  const Vec<D> k4 = f(t + c4 * h, stage([&](std::size_t i) {
                        return a41 * k1[i] + a42 * k2[i] + a43 * k3[i];
                      }), b);
  const Vec<D> k5 = f(t + c5 * h, stage([&](std::size_t i) {
                        return a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i];
                      }), b);
  const Vec<D> k6 = f(t + h, stage([&](std::size_t i) {
                        return a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i];
                      }), b);
  StepResult<D> r;
  for (std::size_t i = 0; i < D; ++i) {
    r.y5[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
  }
  r.k7 = f(t + h, r.y5, b);
  for (std::size_t i = 0; i < D; ++i) {
    r.err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * r.k7[i]);
  }
  r.dense.t0 = t;
  r.dense.h = h;
  for (std::size_t i = 0; i < 2; ++i) {
    auto& c = r.dense.coef[i];
    c[0] = y[i];
    c[1] = r.y5[i] - y[i];
    c[2] = h * k1[i] - c[1];
    c[3] = c[1] - h * r.k7[i] - c[2];
    c[4] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * r.k7[i]);
  }
  return r;
}

// Mixed error norm: each component is measured against its own magnitude
// plus 1e-3 of its group's magnitude (state group, fundamental-matrix group).
template <std::size_t D>
double error_norm(const Vec<D>& y, const Vec<D>& yn, const Vec<D>& err, double tol) {
  const double state_floor =
      1e-3 * std::max({std::abs(y[0]), std::abs(y[1]), std::abs(yn[0]), std::abs(yn[1])}) + 1e-300;
  double mat_floor = 0.0;
  for (std::size_t i = 2; i < D; ++i) mat_floor = std::max({mat_floor, std::abs(y[i]), std::abs(yn[i])});
  mat_floor = 1e-3 * mat_floor + 1e-300;
  double e = 0.0;
  for (std::size_t i = 0; i < D; ++i) {
    const double floor = i < 2 ? state_floor : mat_floor;
    const double sc = tol * (std::max(std::abs(y[i]), std::abs(yn[i])) + floor);
    e = std::max(e, std::abs(err[i]) / sc);
  }
  return e;
}

template <std::size_t D>
bool finite(const Vec<D>& y) {
  return std::all_of(y.begin(), y.end(), [](double x) { return std::isfinite(x); });
}

template <std::size_t D>
Vec<D> run(const ProblemSpec& p, const Vec<D>& y0, double t0, double t1, const IntegrateOptions& opts,
           Trajectory& traj) {
  p.validate();
  if (!(t1 > t0)) throw Error(ErrorCode::InvalidArgument, "integration needs t0 < t1");
  if (!(opts.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");

  Flow<D> flow(p);
  std::vector<double> stops = p.weight.breakpoints_between(t0, t1);
  stops.push_back(t1);
  std::size_t next_stop = 0;
  flow.set_segment(t0, stops[0]);

  const double span = t1 - t0;
  const double h_min = 1e-14 * span;

  traj = Trajectory{};
  traj.times.push_back(t0);
  traj.states.push_back({y0[0], y0[1]});
  if constexpr (D == 6) traj.fundamental.push_back(Matrix2{{y0[2], y0[3], y0[4], y0[5]}});

  Vec<D> y = y0;
  double t = t0;
  Branch branch = flow.initial_branch(t, y[0], y[1]);
  Vec<D> k1 = flow(t, y, branch);

  // Initial step from the ratio of state to slope magnitudes.
  double h = 0.0;
  {
    double d0 = 0.0, d1n = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
      d0 = std::max(d0, std::abs(y[i]));
      d1n = std::max(d1n, std::abs(k1[i]));
    }
    h = (d0 > 0.0 && d1n > 0.0) ? 0.01 * d0 / d1n : 1e-3 * span;
    h = std::clamp(h, 1e-10 * span, 0.1 * span);
  }

  int steps = 0;
  int events = 0;
  while (t < t1) {
    if (++steps > opts.max_steps) throw Error(ErrorCode::StepFailure, "step budget exhausted");
    const double seg_end = stops[next_stop];
    const double h_trial = h;
    bool to_stop = false;
    if (h >= seg_end - t) {
      h = seg_end - t;
      to_stop = true;
    }
    auto st = dp_step(flow, t, y, k1, h, branch);
    const double err = finite(st.y5) && finite(st.err) ? error_norm(y, st.y5, st.err, opts.tol)
                                                     : std::numeric_limits<double>::infinity();
    if (!(err <= 1.0)) {
      const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
      h *= fac;
      if (h < h_min) {
        throw Error(ErrorCode::StepFailure, "step size underflow at t = " + std::to_string(t));
      }
      continue;
    }

    // Look for u crossing into the other branch inside the accepted step.
    const auto wrong_side = [&](double u) {
      return branch == Branch::Right ? u < 0.0 : u > 0.0;
    };
    double th_bad = -1.0;
    for (int k = 1; k <= 16; ++k) {
      const double th = k / 16.0;
      const double u = k == 16 ? st.y5[0] : st.dense.at(t + th * h).u;
      if (wrong_side(u)) {
        th_bad = th;
        break;
      }
    }

    const double fac = err > 0.0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2))) : 5.0;
    if (th_bad > 0.0) {
      if (++events > kMaxEvents) throw Error(ErrorCode::StepFailure, "event chattering");
      double lo = th_bad - 1.0 / 16.0;
      double hi = th_bad;
      for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (wrong_side(st.dense.at(t + mid * h).u)) hi = mid; else lo = mid;
      }
      const double h_event = hi * h;
      st = dp_step(flow, t, y, k1, h_event, branch);
      st.y5[0] = 0.0;
      t += h_event;
      y = st.y5;
      branch = flow.branch_after_zero(t, y[1]);
      k1 = flow(t, y, branch);
      h = std::max(h_event, h_trial);
    } else {
      t = to_stop ? seg_end : t + h;
      y = st.y5;
      if (to_stop) {
        if (next_stop + 1 < stops.size()) {
          ++next_stop;
          flow.set_segment(t, stops[next_stop]);
        }
        k1 = flow(t, y, branch);
        h = h_trial;
      } else {
        k1 = st.k7;
        h *= fac;
      }
    }
    if (!finite(y)) throw Error(ErrorCode::StepFailure, "non-finite state");
    traj.steps.push_back(st.dense);
    traj.times.push_back(t);
    traj.states.push_back({y[0], y[1]});
    if constexpr (D == 6) traj.fundamental.push_back(Matrix2{{y[2], y[3], y[4], y[5]}});
  }
  traj.times.back() = t1;
  return y;
}

}  // namespace

Trajectory integrate(const ProblemSpec& p, State x0, double t0, double t1,
                     const IntegrateOptions& opts) {
  Trajectory traj;
  run<2>(p, Vec<2>{x0.u, x0.v}, t0, t1, opts, traj);
  return traj;
}

std::pair<Trajectory, Matrix2> integrate_with_variational(const ProblemSpec& p, State x0, double t0,
                                                          double t1, const IntegrateOptions& opts) {
  Trajectory traj;
  const Vec<6> y = run<6>(p, Vec<6>{x0.u, x0.v, 1.0, 0.0, 0.0, 1.0}, t0, t1, opts, traj);
  return {std::move(traj), Matrix2{{y[2], y[3], y[4], y[5]}}};
}

}  // namespace indef
