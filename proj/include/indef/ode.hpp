#pragma once

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "indef/nonlinearity.hpp"
#include "indef/weight.hpp"

namespace indef {

enum class BoundaryKind { Periodic, Neumann };

/// u'' + c u' + theta * lambda * a(t) g(u) + alpha = 0, extended by the
/// left branch (default -s) for u < 0.
struct ProblemSpec {
  double c = 0.0;
  double lambda = 1.0;
  double alpha = 0.0;
  double theta = 1.0;
  PeriodicWeight weight = PeriodicWeight::sin_plus_k(-0.5);
  Nonlinearity nonlinearity = Nonlinearity::arctan_pow(2.0);
  BoundaryKind bc = BoundaryKind::Periodic;
  /// Replacement for the s < 0 branch; must be continuous with value 0 at 0.
  /// Empty means the default -s.
  std::function<double(double)> left_branch;

  double period() const { return weight.period(); }
  /// Throws InvalidArgument when the invariants lambda > 0, alpha >= 0,
  /// 0 < theta <= 1 are violated.
  void validate() const;
  ProblemSpec with_lambda(double value) const;
};

struct State {
  double u = 0.0;
  double v = 0.0;

  double norm_inf() const;
  friend State operator+(State a, State b) { return {a.u + b.u, a.v + b.v}; }
  friend State operator-(State a, State b) { return {a.u - b.u, a.v - b.v}; }
  friend State operator*(double s, State a) { return {s * a.u, s * a.v}; }
};

/// Row-major 2x2 matrix.
struct Matrix2 {
  std::array<double, 4> m{1.0, 0.0, 0.0, 1.0};

  static Matrix2 identity() { return {}; }
  double operator()(int i, int j) const { return m[static_cast<std::size_t>(2 * i + j)]; }
  double& operator()(int i, int j) { return m[static_cast<std::size_t>(2 * i + j)]; }
  double det() const { return m[0] * m[3] - m[1] * m[2]; }
  double trace() const { return m[0] + m[3]; }
  double norm_inf() const;
  State apply(State x) const { return {m[0] * x.u + m[1] * x.v, m[2] * x.u + m[3] * x.v}; }
  friend Matrix2 operator*(const Matrix2& a, const Matrix2& b);
};

/// Dormand-Prince continuous extension for one accepted step.
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  std::array<std::array<double, 5>, 2> coef{};  // per component (u, v)

  State at(double t) const;
};

class Trajectory {
 public:
  std::vector<double> times;
  std::vector<State> states;
  std::vector<Matrix2> fundamental;  // filled only by variational integrations
  std::vector<DenseStep> steps;

  double t_begin() const { return times.front(); }
  double t_end() const { return times.back(); }
  State front() const { return states.front(); }
  State back() const { return states.back(); }
  /// Dense-output evaluation; t is clamped to the covered span.
  State at(double t) const;
  /// Samples on a uniform grid of n points spanning the trajectory.
  std::vector<State> sample(int n) const;
  /// min / max of u over step endpoints and step midpoints.
  std::pair<double, double> u_range() const;
  double max_u_on(double lo, double hi) const;
  void append(const Trajectory& next);
};

struct IntegrateOptions {
  double tol = 1e-9;
  int max_steps = 2'000'000;
};

/// f_lambda(t, s) + alpha: theta lambda a(t) g(s) for s >= 0 and the left
/// branch (default -s) for s < 0, plus the constant forcing in both.
double extended_rhs(const ProblemSpec& p, double t, double s);

/// Adaptive Dormand-Prince 5(4) on u' = v, v' = -c v - extended_rhs(t, u).
/// Steps stop at weight breakpoints and at u = 0, where the branch switches.
/// The local error of each step is kept below tol relative to the state
/// magnitude. Throws StepFailure when h falls below 1e-14 (t1 - t0).
Trajectory integrate(const ProblemSpec& p, State x0, double t0, double t1,
                     const IntegrateOptions& opts = {});

/// As integrate, also co-integrating the fundamental matrix of the
/// linearisation; returns M(t1) with M(t0) = I.
std::pair<Trajectory, Matrix2> integrate_with_variational(const ProblemSpec& p, State x0, double t0,
                                                          double t1,
                                                          const IntegrateOptions& opts = {});

}  // namespace indef
