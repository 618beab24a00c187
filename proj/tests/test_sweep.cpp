#include <cmath>
#include <numbers>

#include "doctest.h"
#include "indef/errors.hpp"
#include "indef/sweep.hpp"

using namespace indef;
using std::numbers::pi;

namespace {

ProblemSpec reference(double lambda = 1.0) {
  ProblemSpec p;
  p.lambda = lambda;
  return p;
}

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(std::pow(10.0, lo + (hi - lo) * i / (n - 1)));
  return out;
}

}  // namespace

TEST_CASE("reference sweep sits inside the certified window") {
  const ThresholdReport th = compute_thresholds(reference().weight, reference().nonlinearity, 0.0);
  SweepOptions o;
  o.certified_window = std::make_pair(th.lambda_star_lower, th.lambda_star_upper);
  const SweepResult r = lambda_sweep(reference(), logspace(-4, 4, 17), o);
  REQUIRE(r.empirical_onset.has_value());
  CHECK(r.window_consistent());
  CHECK(r.empirical_onset->first >= th.lambda_star_lower);
  CHECK(r.empirical_onset->second <= th.lambda_star_upper);
  for (const auto& rec : r.records) {
    if (rec.lambda <= th.lambda_star_lower) CHECK(rec.count_positive == 0);
    if (rec.lambda >= th.lambda_star_upper) CHECK(rec.count_positive >= 2);
    for (std::size_t i = 1; i < rec.sup_norms.size(); ++i) CHECK(rec.sup_norms[i - 1] <= rec.sup_norms[i]);
  }
  // Onset bisection leaves a bracket of relative width <= 1e-3.
  const auto [lo, hi] = *r.empirical_onset;
  CHECK((hi - lo) / hi <= 1e-3 + 1e-12);
  for (std::size_t i = 1; i < r.lambda_grid.size(); ++i) CHECK(r.lambda_grid[i] > r.lambda_grid[i - 1]);
  CHECK(r.at(1e4) != nullptr);
  CHECK(r.at(1e4)->count_positive >= 2);
  CHECK(r.max_count() >= 2);
}

TEST_CASE("constant-sign weights have no positive solutions") {
  SweepOptions o;
  o.refine_onset = false;
  for (double k : {1.0, -1.0}) {
    ProblemSpec p = reference();
    p.weight = PeriodicWeight::constant(k);
    CHECK(lambda_sweep(p, logspace(-3, 3, 7), o).max_count() == 0);
  }
  ProblemSpec p = reference();
  p.weight = PeriodicWeight::sin_plus_k(-1.5);
  CHECK(lambda_sweep(p, logspace(-3, 3, 7), o).max_count() == 0);
}

TEST_CASE("sweep input validation") {
  CHECK_THROWS_AS(lambda_sweep(reference(), {1.0, 0.5}), Error);
  CHECK_THROWS_AS(lambda_sweep(reference(), {-1.0, 0.5}), Error);
  CHECK_THROWS_AS(lambda_sweep(reference(), {}), Error);
}

TEST_CASE("continuation follows the large branch in both directions") {
  const MultistartResult at50 = multistart(reference(50.0), default_u0_grid(), {0.0});
  REQUIRE(at50.count_positive() == 2);
  const Solution& large = *at50.positive().back();
  const Solution up = continue_solution(large, 400.0, SweepOptions{});
  CHECK(up.counts_as_positive());
  CHECK(up.problem.lambda == 400.0);
  CHECK(up.sup_norm > large.sup_norm);
  const Solution back = continue_solution(up, 50.0, SweepOptions{});
  CHECK(back.sup_norm == doctest::Approx(large.sup_norm).epsilon(1e-6));
  CHECK_THROWS_AS(continue_solution(large, -1.0, SweepOptions{}), Error);
}

TEST_CASE("necessary condition probe") {
  std::vector<std::pair<std::string, PeriodicWeight>> ws{
      {"k=0", PeriodicWeight::sin_plus_k(0.0)},
      {"k=0.3", PeriodicWeight::sin_plus_k(0.3)},
      {"k=-0.5", PeriodicWeight::sin_plus_k(-0.5)},
  };
  const NecessityReport r = necessary_condition_probe(reference(), ws, logspace(-2, 4, 5));
  CHECK(r.g_increasing);
  REQUIRE(r.entries.size() == 3);
  CHECK(r.entries[0].precondition_ok);
  CHECK(r.entries[0].max_count == 0);
  CHECK(r.entries[1].precondition_ok);
  CHECK(r.entries[1].max_count == 0);
  CHECK_FALSE(r.entries[2].precondition_ok);
  CHECK(r.entries[2].max_count >= 1);
  CHECK(r.ok);

  ProblemSpec bump = reference();
  bump.nonlinearity = Nonlinearity::user([](double s) { return s * s * std::exp(-s); },
                                         [](double s) { return (2 * s - s * s) * std::exp(-s); });
  CHECK_FALSE(necessary_condition_probe(bump, {ws[0]}, {1.0}).g_increasing);
}

TEST_CASE("forced probe") {
  const Interval I{pi / 6, 5 * pi / 6};
  const double lam = 2710.0685304;
  const ForcedReport f = forced_nonexistence_probe(reference(), lam, 1.0, I, pi / 6);
  CHECK(f.alpha == doctest::Approx(1.01 * (12 / pi) / (pi / 3)).epsilon(1e-12));
  CHECK(f.lambda_above_threshold);
  CHECK(f.below_rho == 0);

  const ForcedReport z = forced_nonexistence_probe(reference(), lam, 1.0, I, pi / 6, 0.0);
  CHECK(z.below_rho >= 1);

  const ForcedReport ten = forced_nonexistence_probe(reference(), lam, 10.0, I, pi / 6);
  CHECK(ten.alpha == doctest::Approx(10 * f.alpha).epsilon(1e-12));
  CHECK(ten.below_rho == 0);
}
