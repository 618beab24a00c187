#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "indef/shooting.hpp"
#include "indef/thresholds.hpp"

namespace indef {

struct SweepOptions {
  MultistartOptions multistart;
  std::vector<double> u0_grid = default_u0_grid();
  std::vector<double> v0_grid{0.0};
  /// Largest lambda ratio of one continuation substep.
  double max_substep_ratio = 1.15;
  int max_substep_halvings = 6;
  /// Bisect the first 0 -> positive count change down to this relative width.
  bool refine_onset = true;
  double onset_rel_width = 1e-3;
  /// Attached to the result as the certified window (lambda_*, lambda*).
  std::optional<std::pair<double, double>> certified_window;
};

struct SweepRecord {
  double lambda = 0.0;
  int count_positive = 0;
  std::vector<double> sup_norms;  // positive solutions, ascending
  std::vector<int> indices;
  std::vector<double> max_on_I;
  int failures = 0;
  bool refined = false;  // added by onset bisection
  std::vector<Solution> positive;  // kept for continuation and export
};

struct SweepResult {
  std::vector<double> lambda_grid;  // strictly increasing, refinements included
  std::vector<SweepRecord> records;
  /// (largest lambda with count 0 below the first count >= 2, that lambda).
  std::optional<std::pair<double, double>> empirical_onset;
  std::optional<std::pair<double, double>> certified_window;

  int max_count() const;
  /// lambda_* <= onset.first and onset.second <= lambda*; true when either is absent.
  bool window_consistent() const;
  const SweepRecord* at(double lambda) const;
};

/// Census across increasing positive lambdas. Positive solutions at each
/// lambda are continued to the next one in substeps and seeded, together
/// with the grid starts, into multistart.
SweepResult lambda_sweep(const ProblemSpec& tmpl, const std::vector<double>& lambdas,
                         const SweepOptions& opts = {},
                         const std::vector<ShootingMesh>& starts = {});

/// Natural continuation of one solution to `target` (either direction)
/// with a power-law amplitude predictor. Throws NoConvergence when the
/// substep falls below the halving limit or the branch collapses to Trivial.
Solution continue_solution(const Solution& from, double target, const SweepOptions& opts);

struct NecessityEntry {
  std::string label;
  double integral = 0.0;
  bool precondition_ok = false;  // integral of a >= 0
  int max_count = 0;
  std::vector<double> lambdas_with_hits;
};

struct NecessityReport {
  bool g_increasing = false;
  std::vector<NecessityEntry> entries;
  /// No positive solution for any weight meeting the precondition.
  bool ok = false;
};

/// Sweeps each weight with the template's nonlinearity (checked strictly
/// increasing on a probe grid) and records any positive solution.
NecessityReport necessary_condition_probe(const ProblemSpec& tmpl,
                                          const std::vector<std::pair<std::string, PeriodicWeight>>& weights,
                                          const std::vector<double>& lambdas,
                                          const SweepOptions& opts = {});

struct ForcedReport {
  double lambda = 0.0;
  double alpha = 0.0;
  double rho = 0.0;
  Interval I;
  int solutions = 0;
  int nonnegative = 0;
  /// Nonnegative solutions with max over I <= rho (should be 0 when forced).
  int below_rho = 0;
  std::vector<double> max_on_I;
  bool lambda_above_threshold = false;
};

/// Multistart at the given lambda with forcing alpha (alpha* when not
/// given) and reports nonnegative solutions whose max over I is <= rho.
ForcedReport forced_nonexistence_probe(const ProblemSpec& tmpl, double lambda, double rho,
                                       const Interval& I, double eps,
                                       std::optional<double> alpha = std::nullopt,
                                       const SweepOptions& opts = {},
                                       const std::vector<ShootingMesh>& starts = {});

}  // namespace indef
