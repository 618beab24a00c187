#pragma once

#include <functional>
#include <string>
#include <vector>

#include "indef/shooting.hpp"
#include "indef/weight.hpp"

namespace indef {

/// {R1 < |x| < R2} in R^N.
struct Annulus {
  int N = 2;
  double R1 = 1.0;
  double R2 = 2.0;

  void validate() const;
  /// h(r) = integral of xi^{1-N} from R1 to r, closed form.
  double h(double r) const;
  /// Inverse of h on [0, T]; r(0) = R1 and r(T) = R2 exactly.
  double radius(double t) const;
  double T() const;
};

/// Radial profile Q of the weight q(x) = Q(|x|), continuous on [R1, R2].
struct RadialWeight {
  std::function<double(double)> Q;
  std::string label = "user";

  double operator()(double r) const { return Q(r); }
  static RadialWeight constant(double value);
  /// Q(r) = (sin(omega ln r) + k) r^power.
  static RadialWeight log_sin_plus_k(double k, double power = 0.0, double omega = 1.0);
  /// Q(r) = c0 + c1 r + c2 r^2 + ...
  static RadialWeight polynomial(std::vector<double> coeffs);
};

struct ReducedProblem {
  Annulus annulus;
  double T = 0.0;
  /// a(t) = r(t)^{2(N-1)} Q(r(t)), used on [0, T] with Neumann conditions.
  PeriodicWeight weight = PeriodicWeight::constant(0.0, 1.0);

  double radius(double t) const { return annulus.radius(t); }
  /// Neumann problem on the reduced weight with the given template.
  ProblemSpec problem(const ProblemSpec& base) const;
};

ReducedProblem reduce(const Annulus& ann, const RadialWeight& Q);

struct QStarReport {
  double value = 0.0;  // integral of r^{N-1} Q over [R1, R2]
  bool holds = false;  // value < 0
};

QStarReport check_q_star(const Annulus& ann, const RadialWeight& Q);

struct RadialProfile {
  std::vector<double> r;
  std::vector<double> U;
  std::vector<double> dU;
  /// sup over interior nodes of |U'' + (N-1)/r U' + f| with U'' from
  /// central differences of U'.
  double residual_abs = 0.0;
  /// residual_abs / (1 + sup |f|), f the reaction term.
  double residual_scaled = 0.0;
  double dU_R1 = 0.0;
  double dU_R2 = 0.0;
};

/// U(r) = u(h(r)) on n radii (uniform in t). The solution is re-integrated
/// arc by arc from its shooting nodes at `tol` before sampling.
RadialProfile lift(const Solution& sol, const Annulus& ann, const RadialWeight& Q, int n = 4001,
                   double tol = 1e-12);

}  // namespace indef
