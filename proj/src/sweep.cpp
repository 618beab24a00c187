#include "indef/sweep.hpp"

#include <algorithm>
#include <cmath>

#include "indef/errors.hpp"

namespace indef {

int SweepResult::max_count() const {
  int m = 0;
  for (const auto& r : records) m = std::max(m, r.count_positive);
  return m;
}

bool SweepResult::window_consistent() const {
  if (!empirical_onset || !certified_window) return true;
  return certified_window->first <= empirical_onset->first &&
         empirical_onset->second <= certified_window->second;
}

const SweepRecord* SweepResult::at(double lambda) const {
  for (const auto& r : records) {
    if (r.lambda == lambda) return &r;
  }
  return nullptr;
}

Solution continue_solution(const Solution& from, double target, const SweepOptions& opts) {
  if (!(target > 0.0)) throw Error(ErrorCode::InvalidArgument, "target lambda must be positive");
  const double max_step = std::log(std::max(opts.max_substep_ratio, 1.0 + 1e-6));
  const double min_step = max_step / std::pow(2.0, opts.max_substep_halvings);
  Solution cur = from;
  double lam = from.problem.lambda;
  // Amplitude exponent d ln|u| / d ln lambda; unknown until one step is taken.
  std::optional<double> power;
  double step = std::min(max_step, 0.02);
  while (lam != target) {
    const double remaining = std::log(target / lam);
    const double s = std::copysign(std::min(std::abs(remaining), step), remaining);
    const double next = std::abs(remaining) <= step ? target : lam * std::exp(s);
    const double pw = power.value_or(0.0);
    const double predicted_sup = cur.sup_norm * std::exp(s * pw);
    bool ok = false;
    try {
      Solution trial = find_solution(cur.problem.with_lambda(next), cur.mesh.scaled(std::exp(s * pw)),
                                     opts.multistart.shooting);
      // A collapse to another branch shows up as a jump in amplitude.
      ok = trial.positivity == Positivity::StrictlyPositive && !trial.degenerate &&
           std::abs(std::log(trial.sup_norm / predicted_sup)) < 0.5;
      if (ok) {
        const double p = std::log(trial.sup_norm / cur.sup_norm) / std::log(next / lam);
        power = std::clamp(p, -3.0, 3.0);
        cur = std::move(trial);
        lam = next;
        step = std::min(max_step, 1.5 * step);
      }
    } catch (const Error&) {
      ok = false;
    }
    if (!ok) {
      step *= 0.5;
      if (step < min_step) throw Error(ErrorCode::NoConvergence, "continuation step underflow");
    }
  }
  return cur;
}

namespace {

SweepRecord census(const ProblemSpec& tmpl, double lambda, const SweepOptions& opts,
                   const std::vector<ShootingMesh>& warm) {
  const ProblemSpec p = tmpl.with_lambda(lambda);
  MultistartResult ms = multistart(p, opts.u0_grid, opts.v0_grid, opts.multistart, warm);
  SweepRecord rec;
  rec.lambda = lambda;
  rec.failures = static_cast<int>(ms.failures.size());
  for (auto& s : ms.solutions) {
    if (!s.counts_as_positive()) continue;
    rec.sup_norms.push_back(s.sup_norm);
    rec.indices.push_back(s.index);
    rec.max_on_I.push_back(s.max_on_I);
    rec.positive.push_back(std::move(s));
  }
  rec.count_positive = static_cast<int>(rec.positive.size());
  return rec;
}

std::vector<ShootingMesh> continued(const std::vector<Solution>& sols, double lambda,
                                    const SweepOptions& opts) {
  std::vector<ShootingMesh> out;
  for (const auto& s : sols) {
    try {
      out.push_back(continue_solution(s, lambda, opts).mesh);
    } catch (const Error&) {
      // Branch lost (fold or failure); grid starts still cover the census.
    }
  }
  return out;
}

}  // namespace

SweepResult lambda_sweep(const ProblemSpec& tmpl, const std::vector<double>& lambdas,
                         const SweepOptions& opts, const std::vector<ShootingMesh>& starts) {
  if (lambdas.empty()) throw Error(ErrorCode::InvalidArgument, "lambda grid is empty");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0) || (i > 0 && !(lambdas[i] > lambdas[i - 1]))) {
      throw Error(ErrorCode::InvalidArgument, "lambdas must be positive and strictly increasing");
    }
  }
  SweepResult res;
  res.certified_window = opts.certified_window;
  for (double lam : lambdas) {
    std::vector<ShootingMesh> warm = starts;
    if (!res.records.empty()) {
      for (auto& m : continued(res.records.back().positive, lam, opts)) warm.push_back(std::move(m));
    }
    res.records.push_back(census(tmpl, lam, opts, warm));
  }

  // Backward pass: branches seen at a larger lambda are continued down to
  // each smaller grid value, which recovers solutions the grid missed.
  for (std::size_t i = res.records.size() - 1; i-- > 0;) {
    const auto extra = continued(res.records[i + 1].positive, res.records[i].lambda, opts);
    if (extra.empty()) continue;
    std::vector<ShootingMesh> warm = starts;
    for (const auto& s : res.records[i].positive) warm.push_back(s.mesh);
    for (const auto& m : extra) warm.push_back(m);
    SweepRecord rec = census(tmpl, res.records[i].lambda, opts, warm);
    if (rec.count_positive > res.records[i].count_positive) res.records[i] = std::move(rec);
  }

  if (opts.refine_onset) {
    for (std::size_t i = 0; i + 1 < res.records.size(); ++i) {
      if (res.records[i].count_positive != 0 || res.records[i + 1].count_positive == 0) continue;
      double lo = res.records[i].lambda;
      double hi = res.records[i + 1].lambda;
      std::vector<Solution> hi_sols = res.records[i + 1].positive;
      std::vector<SweepRecord> added;
      while (hi - lo > opts.onset_rel_width * hi) {
        const double mid = std::sqrt(lo * hi);
        std::vector<ShootingMesh> warm = starts;
        for (auto& m : continued(hi_sols, mid, opts)) warm.push_back(std::move(m));
        SweepRecord rec = census(tmpl, mid, opts, warm);
        rec.refined = true;
        if (rec.count_positive > 0) {
          hi = mid;
          hi_sols = rec.positive;
        } else {
          lo = mid;
        }
        added.push_back(std::move(rec));
      }
      for (auto& r : added) res.records.push_back(std::move(r));
      break;
    }
    std::sort(res.records.begin(), res.records.end(),
              [](const SweepRecord& a, const SweepRecord& b) { return a.lambda < b.lambda; });
  }
  for (const auto& r : res.records) res.lambda_grid.push_back(r.lambda);

  for (std::size_t j = 0; j < res.records.size(); ++j) {
    if (res.records[j].count_positive < 2) continue;
    for (std::size_t i = j; i-- > 0;) {
      if (res.records[i].count_positive == 0) {
        res.empirical_onset = std::make_pair(res.records[i].lambda, res.records[j].lambda);
        break;
      }
    }
    break;
  }
  return res;
}

NecessityReport necessary_condition_probe(
    const ProblemSpec& tmpl, const std::vector<std::pair<std::string, PeriodicWeight>>& weights,
    const std::vector<double>& lambdas, const SweepOptions& opts) {
  NecessityReport rep;
  rep.g_increasing = true;
  double prev = tmpl.nonlinearity.g(0.0);
  for (int i = 0; i <= 240; ++i) {
    const double s = std::pow(10.0, -6.0 + 12.0 * i / 240.0);
    const double g = tmpl.nonlinearity.g(s);
    if (!(g > prev) || !(tmpl.nonlinearity.gprime(s) > 0.0)) rep.g_increasing = false;
    prev = g;
  }
  SweepOptions o = opts;
  o.refine_onset = false;
  rep.ok = true;
  for (const auto& [label, w] : weights) {
    NecessityEntry e;
    e.label = label;
    e.integral = w.integral(0.0, w.period());
    e.precondition_ok = e.integral >= 0.0;
    ProblemSpec p = tmpl;
    p.weight = w;
    const SweepResult sr = lambda_sweep(p, lambdas, o);
    for (const auto& r : sr.records) {
      e.max_count = std::max(e.max_count, r.count_positive);
      if (r.count_positive > 0) e.lambdas_with_hits.push_back(r.lambda);
    }
    if (e.precondition_ok && e.max_count > 0) rep.ok = false;
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

ForcedReport forced_nonexistence_probe(const ProblemSpec& tmpl, double lambda, double rho,
                                       const Interval& I, double eps, std::optional<double> alpha,
                                       const SweepOptions& opts,
                                       const std::vector<ShootingMesh>& starts) {
  ForcedReport rep;
  rep.lambda = lambda;
  rep.rho = rho;
  rep.I = I;
  rep.alpha = alpha ? *alpha : compute_alpha_star(tmpl.weight, tmpl.c, rho, I, eps).alpha_star;
  rep.lambda_above_threshold =
      lambda > compute_lambda_upper(tmpl.weight, tmpl.nonlinearity, tmpl.c, rho, I, eps).lambda_star;
  ProblemSpec p = tmpl.with_lambda(lambda);
  p.alpha = rep.alpha;
  MultistartOptions mo = opts.multistart;
  mo.shooting.focus = I;
  const MultistartResult ms = multistart(p, opts.u0_grid, opts.v0_grid, mo, starts);
  for (const auto& s : ms.solutions) {
    if (s.degenerate) continue;
    ++rep.solutions;
    const bool nonneg = s.min_u >= -1e-8 * (1.0 + s.sup_norm);
    if (!nonneg || s.positivity == Positivity::Trivial) continue;
    ++rep.nonnegative;
    rep.max_on_I.push_back(s.max_on_I);
    if (s.max_on_I <= rho) ++rep.below_rho;
  }
  return rep;
}

}  // namespace indef
