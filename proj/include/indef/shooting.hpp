#pragma once

#include <optional>
#include <string>
#include <vector>

#include "indef/ode.hpp"
#include "indef/weight.hpp"

namespace indef {

enum class Positivity { StrictlyPositive, Trivial, SignChanging };

std::string_view to_string(Positivity p);

/// Node times (starting at 0) and node states for multiple shooting over one
/// period; a single node is plain single shooting.
struct ShootingMesh {
  std::vector<double> times{0.0};
  std::vector<State> states{State{}};

  static ShootingMesh single(State x0) { return ShootingMesh{{0.0}, {x0}}; }
  ShootingMesh scaled(double factor) const;
};

struct ShootingOptions {
  double tol = 1e-9;          // integrator tolerance
  double newton_tol = 1e-9;   // |F| <= newton_tol (1 + |x|)
  double step_rtol = 1e-6;    // final Newton step relative to |x|
  int max_iter = 60;
  int max_halvings = 8;
  double degeneracy_tol = 1e-8;
  double singular_tol = 1e-12;
  /// Segments whose flow Jacobian exceeds this gain are split at their
  /// midpoint; keeps each shooting arc well conditioned.
  double max_segment_gain = 10;
  int max_segments = 256;
  /// Interval on which max_on_I is reported (optional).
  std::optional<Interval> focus;
};

struct Solution {
  ProblemSpec problem;
  State initial_state;
  Trajectory trajectory;
  ShootingMesh mesh;
  double sup_norm = 0.0;
  double min_u = 0.0;
  double max_on_I = 0.0;  // NaN when no focus interval was set
  double residual = 0.0;
  int index = 0;
  /// det(Id - DP) for periodic problems, d v(T) / d u0 for Neumann.
  double jacobian_det = 0.0;
  Matrix2 monodromy;
  Positivity positivity = Positivity::Trivial;
  /// Converged with |det(DP - Id)| below singular_tol: not an isolated solution.
  bool degenerate = false;
  int iterations = 0;

  /// Index 0 means not isolated at the numerical resolution (for example
  /// near-solutions at infinity when g saturates); such hits are reported
  /// but never counted.
  bool counts_as_positive() const {
    return positivity == Positivity::StrictlyPositive && !degenerate && index != 0;
  }
};

/// (u(T), u'(T)) and the flow Jacobian over one period from t = 0.
std::pair<State, Matrix2> poincare_map(const ProblemSpec& p, State x0, double tol = 1e-9);

/// Damped Newton on P(x) - x. Throws NoConvergence or SingularJacobian.
Solution find_periodic(const ProblemSpec& p, State guess, const ShootingOptions& opts = {});
Solution find_periodic(const ProblemSpec& p, const ShootingMesh& guess,
                       const ShootingOptions& opts = {});

/// Newton on v(T; (u0, 0)) = 0 (together with the multiple-shooting
/// continuity conditions when the mesh has several nodes).
Solution find_neumann(const ProblemSpec& p, double u0_guess, const ShootingOptions& opts = {});
Solution find_neumann(const ProblemSpec& p, const ShootingMesh& guess,
                      const ShootingOptions& opts = {});

/// Dispatches on p.bc.
Solution find_solution(const ProblemSpec& p, const ShootingMesh& guess,
                       const ShootingOptions& opts = {});

struct StartFailure {
  State start;
  std::string message;
};

struct MultistartResult {
  std::vector<Solution> solutions;  // deduplicated, sorted by sup_norm
  std::vector<StartFailure> failures;

  int count_positive() const;
  std::vector<const Solution*> positive() const;
};

struct MultistartOptions {
  ShootingOptions shooting;
  double dedup_tol = 1e-4;  // relative trajectory sup-norm distance
  int jobs = 1;
};

/// Default starts: u0 in logspace(1e-3, 1e3, 25), v0 = 0.
std::vector<double> default_u0_grid();

MultistartResult multistart(const ProblemSpec& p, const std::vector<double>& u0_grid,
                            const std::vector<double>& v0_grid, const MultistartOptions& opts = {},
                            const std::vector<ShootingMesh>& warm_starts = {});

/// Sup-norm distance between two solutions' u on a common time grid.
double trajectory_distance(const Solution& a, const Solution& b, int samples = 512);

struct EstimateReport {
  bool holds = true;
  double max_slack = 0.0;  // max over grid of |u'| - (u / eps) e^{|c| T}
  int points = 0;
  double window_lo = 0.0;
  double window_hi = 0.0;
};

/// Checks |u'(t)| <= (u(t) / eps) e^{|c| T} on [lo + eps, hi - eps].
/// Throws PreconditionViolated if the weight is negative on I.
EstimateReport derivative_estimate_check(const Solution& sol, const Interval& I, double eps,
                                  int grid = 4001);

/// Same inequality on raw samples (t, u, u').
EstimateReport derivative_estimate_check_samples(const std::vector<double>& t, const std::vector<State>& x,
                                          double c, double period, double eps);

/// det(Id - DP) from central finite differences of the flow, segment by
/// segment along the mesh (no variational equations involved).
double finite_difference_index_det(const ProblemSpec& p, const ShootingMesh& mesh,
                                   double tol = 1e-11);

}  // namespace indef
