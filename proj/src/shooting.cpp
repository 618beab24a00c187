#include "indef/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "indef/errors.hpp"
#include "indef/parallel.hpp"

namespace indef {

std::string_view to_string(Positivity p) {
  switch (p) {
    case Positivity::StrictlyPositive: return "StrictlyPositive";
    case Positivity::Trivial: return "Trivial";
    case Positivity::SignChanging: return "SignChanging";
  }
  return "Unknown";
}

ShootingMesh ShootingMesh::scaled(double factor) const {
  ShootingMesh out = *this;
  for (auto& s : out.states) s = factor * s;
  return out;
}

std::pair<State, Matrix2> poincare_map(const ProblemSpec& p, State x0, double tol) {
  IntegrateOptions o;
  o.tol = tol;
  auto [traj, M] = integrate_with_variational(p, x0, 0.0, p.period(), o);
  return {traj.back(), M};
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Arc {
  Trajectory traj;
  State end;
  Matrix2 M;
};

struct Evaluation {
  std::vector<Arc> arcs;
};

double arc_end_time(const ShootingMesh& mesh, std::size_t k, double T) {
  return k + 1 < mesh.times.size() ? mesh.times[k + 1] : T;
}

Arc shoot_arc(const ProblemSpec& p, State x, double t0, double t1, double tol) {
  IntegrateOptions o;
  o.tol = tol;
  auto [traj, M] = integrate_with_variational(p, x, t0, t1, o);
  Arc a;
  a.end = traj.back();
  a.M = M;
  a.traj = std::move(traj);
  return a;
}

// Integrates every arc; when `refine` is set, arcs with excessive gain are
// split (the mesh grows) until each is acceptable or limits are reached.
Evaluation evaluate(const ProblemSpec& p, ShootingMesh& mesh, const ShootingOptions& opts,
                    bool refine) {
  const double T = p.period();
  const double min_len = T / 4096.0;
  Evaluation ev;
  std::size_t k = 0;
  while (k < mesh.times.size()) {
    const double t0 = mesh.times[k];
    const double t1 = arc_end_time(mesh, k, T);
    Arc arc = shoot_arc(p, mesh.states[k], t0, t1, opts.tol);
    if (refine && arc.M.norm_inf() > opts.max_segment_gain &&
        static_cast<int>(mesh.times.size()) < opts.max_segments && (t1 - t0) > 2.0 * min_len) {
      const double mid = 0.5 * (t0 + t1);
      mesh.times.insert(mesh.times.begin() + static_cast<long>(k) + 1, mid);
      mesh.states.insert(mesh.states.begin() + static_cast<long>(k) + 1, arc.traj.at(mid));
      continue;
    }
    ev.arcs.push_back(std::move(arc));
    ++k;
  }
  return ev;
}

struct Condensed {
  Matrix2 DP;
  double det_dp = 1.0;
};

Condensed condense(const Evaluation& ev) {
  Condensed c;
  for (const auto& a : ev.arcs) {
    c.DP = a.M * c.DP;
    c.det_dp *= a.M.det();
  }
  return c;
}

// det(DP - Id) = det(Id - DP) in two dimensions. The determinant of DP is
// taken from the per-arc product, which avoids the cancellation in
// a d - b c when the entries are huge.
double fixed_point_det(const Condensed& c) { return c.det_dp - c.DP.trace() + 1.0; }

struct System {
  Eigen::VectorXd residual;
  Eigen::MatrixXd jacobian;
  Eigen::VectorXd weights;  // 1 / (1 + |target|) per row
  double measure = 0.0;     // max weighted residual
};

double weighted_merit(const Eigen::VectorXd& r, const Eigen::VectorXd& w) {
  return r.cwiseProduct(w).squaredNorm();
}

System assemble(const ProblemSpec& p, const ShootingMesh& mesh, const Evaluation& ev) {
  const auto m = mesh.times.size();
  const auto n = static_cast<Eigen::Index>(2 * m);
  System s;
  s.residual = Eigen::VectorXd::Zero(n);
  s.jacobian = Eigen::MatrixXd::Zero(n, n);
  s.weights = Eigen::VectorXd::Ones(n);
  const auto note = [&](Eigen::Index row, double scale) { s.weights(row) = 1.0 / (1.0 + scale); };
  if (p.bc == BoundaryKind::Periodic) {
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t next = (k + 1) % m;
      const State target = mesh.states[next];
      const State r = ev.arcs[k].end - target;
      const auto row = static_cast<Eigen::Index>(2 * k);
      s.residual(row) = r.u;
      s.residual(row + 1) = r.v;
      const Matrix2& M = ev.arcs[k].M;
      const auto col = static_cast<Eigen::Index>(2 * k);
      const auto col_next = static_cast<Eigen::Index>(2 * next);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) s.jacobian(row + i, col + j) += M(i, j);
        s.jacobian(row + i, col_next + i) -= 1.0;
      }
      note(row, target.norm_inf());
      note(row + 1, target.norm_inf());
    }
  } else {
    // Row 0: v_0 = 0; continuity blocks; last row: v(T) = 0.
    s.residual(0) = mesh.states[0].v;
    s.jacobian(0, 1) = 1.0;
    note(0, mesh.states[0].norm_inf());
    for (std::size_t k = 0; k + 1 < m; ++k) {
      const State target = mesh.states[k + 1];
      const State r = ev.arcs[k].end - target;
      const auto row = static_cast<Eigen::Index>(1 + 2 * k);
      const auto col = static_cast<Eigen::Index>(2 * k);
      s.residual(row) = r.u;
      s.residual(row + 1) = r.v;
      const Matrix2& M = ev.arcs[k].M;
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) s.jacobian(row + i, col + j) += M(i, j);
        s.jacobian(row + i, col + 2 + i) -= 1.0;
      }
      note(row, target.norm_inf());
      note(row + 1, target.norm_inf());
    }
    const auto last = static_cast<Eigen::Index>(n - 1);
    const Arc& tail = ev.arcs[m - 1];
    s.residual(last) = tail.end.v;
    s.jacobian(last, static_cast<Eigen::Index>(2 * (m - 1))) = tail.M(1, 0);
    s.jacobian(last, static_cast<Eigen::Index>(2 * (m - 1) + 1)) = tail.M(1, 1);
    note(last, tail.end.norm_inf());
  }
  s.measure = s.residual.cwiseProduct(s.weights).lpNorm<Eigen::Infinity>();
  return s;
}

double mesh_norm(const ShootingMesh& mesh) {
  double n = 0.0;
  for (const auto& s : mesh.states) n = std::max(n, s.norm_inf());
  return n;
}

ShootingMesh apply_step(const ShootingMesh& mesh, const Eigen::VectorXd& dx, double scale) {
  ShootingMesh out = mesh;
  for (std::size_t k = 0; k < out.states.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(2 * k);
    out.states[k].u += scale * dx(i);
    out.states[k].v += scale * dx(i + 1);
  }
  return out;
}

Solution build_solution(const ProblemSpec& p, const ShootingMesh& mesh, Evaluation&& ev,
                        const System& sys, const ShootingOptions& opts, bool degenerate,
                        int iterations) {
  Solution sol;
  sol.problem = p;
  sol.mesh = mesh;
  sol.initial_state = mesh.states.front();
  for (auto& a : ev.arcs) sol.trajectory.append(a.traj);
  const Condensed c = condense(ev);
  sol.monodromy = c.DP;
  sol.residual = sys.measure;
  sol.iterations = iterations;
  sol.degenerate = degenerate;
  if (p.bc == BoundaryKind::Periodic) {
    sol.jacobian_det = fixed_point_det(c);
  } else {
    sol.jacobian_det = c.DP(1, 0);
  }
  if (std::abs(sol.jacobian_det) > opts.degeneracy_tol) {
    sol.index = sol.jacobian_det > 0.0 ? 1 : -1;
  } else {
    sol.index = 0;
  }
  const auto [lo, hi] = sol.trajectory.u_range();
  sol.min_u = lo;
  sol.sup_norm = std::max(std::abs(lo), std::abs(hi));
  sol.max_on_I = opts.focus ? sol.trajectory.max_u_on(opts.focus->lo, opts.focus->hi)
                            : std::numeric_limits<double>::quiet_NaN();
  const double pos_tol = 1e-8 * (1.0 + sol.sup_norm);
  if (sol.min_u > pos_tol) {
    sol.positivity = Positivity::StrictlyPositive;
  } else if (sol.sup_norm <= pos_tol) {
    sol.positivity = Positivity::Trivial;
  } else {
    sol.positivity = Positivity::SignChanging;
  }
  return sol;
}

Solution newton(const ProblemSpec& p, ShootingMesh mesh, const ShootingOptions& opts) {
  p.validate();
  const double T = p.period();
  if (mesh.times.empty() || mesh.times.size() != mesh.states.size() || mesh.times.front() != 0.0) {
    throw Error(ErrorCode::InvalidArgument, "shooting mesh must start at t = 0");
  }
  for (std::size_t k = 1; k < mesh.times.size(); ++k) {
    if (!(mesh.times[k] > mesh.times[k - 1]) || !(mesh.times[k] < T)) {
      throw Error(ErrorCode::InvalidArgument, "shooting mesh times must increase inside [0, T)");
    }
  }
  if (p.bc == BoundaryKind::Neumann) mesh.states.front().v = 0.0;

  std::optional<Evaluation> cached;
  for (int it = 0; it <= opts.max_iter; ++it) {
    Evaluation ev;
    if (cached) {
      // Re-split only if some arc became too expansive.
      bool needs_split = false;
      for (const auto& a : cached->arcs) {
        if (a.M.norm_inf() > opts.max_segment_gain &&
            static_cast<int>(mesh.times.size()) < opts.max_segments) {
          needs_split = true;
        }
      }
      ev = needs_split ? evaluate(p, mesh, opts, true) : std::move(*cached);
    } else {
      ev = evaluate(p, mesh, opts, true);
    }
    cached.reset();

    const System sys = assemble(p, mesh, ev);
    const Condensed cond = condense(ev);
    const double det = p.bc == BoundaryKind::Periodic ? fixed_point_det(cond) : cond.DP(1, 0);
    const bool singular = !(std::abs(det) >= opts.singular_tol);
    const double xnorm = mesh_norm(mesh);

    Eigen::VectorXd dx;
    bool have_step = false;
    const auto solve = [&] {
      if (!have_step) {
        dx = sys.jacobian.fullPivLu().solve(-sys.residual);
        have_step = true;
      }
      return dx.allFinite();
    };

    if (sys.measure <= opts.newton_tol) {
      if (xnorm <= 1e-10 || singular) {
        return build_solution(p, mesh, std::move(ev), sys, opts, singular, it);
      }
      if (solve() && dx.lpNorm<Eigen::Infinity>() <= opts.step_rtol * xnorm) {
        return build_solution(p, mesh, std::move(ev), sys, opts, false, it);
      }
    }
    if (it == opts.max_iter) break;
    if (singular) {
      throw Error(ErrorCode::SingularJacobian, "det(DP - Id) vanishes at the iterate");
    }
    if (!solve()) throw Error(ErrorCode::NoConvergence, "non-finite Newton step");

    const double merit = weighted_merit(sys.residual, sys.weights);
    double scale = 1.0;
    bool accepted = false;
    ShootingMesh trial;
    for (int h = 0; h <= opts.max_halvings; ++h, scale *= 0.5) {
      trial = apply_step(mesh, dx, scale);
      try {
        Evaluation tev = evaluate(p, trial, opts, false);
        const System tsys = assemble(p, trial, tev);
        if (weighted_merit(tsys.residual, sys.weights) < (1.0 - 1e-4 * scale) * merit) {
          cached = std::move(tev);
          accepted = true;
          break;
        }
      } catch (const Error&) {
        // Treated as an infinite merit; keep halving.
      }
    }
    if (!accepted) throw Error(ErrorCode::NoConvergence, "line search failed");
    mesh = std::move(trial);
  }
  throw Error(ErrorCode::NoConvergence, "Newton iteration limit reached");
}

}  // namespace

Solution find_periodic(const ProblemSpec& p, State guess, const ShootingOptions& opts) {
  return find_periodic(p, ShootingMesh::single(guess), opts);
}

Solution find_periodic(const ProblemSpec& p, const ShootingMesh& guess, const ShootingOptions& opts) {
  if (p.bc != BoundaryKind::Periodic) {
    throw Error(ErrorCode::InvalidArgument, "find_periodic needs a periodic problem");
  }
  return newton(p, guess, opts);
}

Solution find_neumann(const ProblemSpec& p, double u0_guess, const ShootingOptions& opts) {
  return find_neumann(p, ShootingMesh::single({u0_guess, 0.0}), opts);
}

Solution find_neumann(const ProblemSpec& p, const ShootingMesh& guess, const ShootingOptions& opts) {
  if (p.bc != BoundaryKind::Neumann) {
    throw Error(ErrorCode::InvalidArgument, "find_neumann needs a Neumann problem");
  }
  return newton(p, guess, opts);
}

Solution find_solution(const ProblemSpec& p, const ShootingMesh& guess, const ShootingOptions& opts) {
  return p.bc == BoundaryKind::Periodic ? find_periodic(p, guess, opts)
                                        : find_neumann(p, guess, opts);
}

int MultistartResult::count_positive() const {
  return static_cast<int>(std::count_if(solutions.begin(), solutions.end(),
                                        [](const Solution& s) { return s.counts_as_positive(); }));
}

std::vector<const Solution*> MultistartResult::positive() const {
  std::vector<const Solution*> out;
  for (const auto& s : solutions) {
    if (s.counts_as_positive()) out.push_back(&s);
  }
  return out;
}

std::vector<double> default_u0_grid() {
  std::vector<double> g(25);
  for (int i = 0; i < 25; ++i) g[static_cast<std::size_t>(i)] = std::pow(10.0, -3.0 + 6.0 * i / 24.0);
  return g;
}

double trajectory_distance(const Solution& a, const Solution& b, int samples) {
  const double T = a.problem.period();
  double d = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = T * i / (samples - 1);
    d = std::max(d, std::abs(a.trajectory.at(t).u - b.trajectory.at(t).u));
  }
  return d;
}

MultistartResult multistart(const ProblemSpec& p, const std::vector<double>& u0_grid,
                            const std::vector<double>& v0_grid, const MultistartOptions& opts,
                            const std::vector<ShootingMesh>& warm_starts) {
  std::vector<ShootingMesh> starts = warm_starts;
  if (p.bc == BoundaryKind::Neumann) {
    for (double u0 : u0_grid) starts.push_back(ShootingMesh::single({u0, 0.0}));
  } else {
    const std::vector<double> vs = v0_grid.empty() ? std::vector<double>{0.0} : v0_grid;
    for (double u0 : u0_grid) {
      for (double v0 : vs) starts.push_back(ShootingMesh::single({u0, v0}));
    }
  }

  std::vector<std::optional<Solution>> found(starts.size());
  std::vector<std::string> errors(starts.size());
  parallel_for(starts.size(), opts.jobs, [&](std::size_t i) {
    try {
      found[i] = find_solution(p, starts[i], opts.shooting);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });

  MultistartResult result;
  std::vector<Solution> all;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (found[i]) {
      all.push_back(std::move(*found[i]));
    } else {
      result.failures.push_back({starts[i].states.front(), errors[i]});
    }
  }
  // Sort first so the merge is deterministic regardless of completion order.
  std::stable_sort(all.begin(), all.end(), [](const Solution& a, const Solution& b) {
    if (a.sup_norm != b.sup_norm) return a.sup_norm < b.sup_norm;
    return a.residual < b.residual;
  });
  for (auto& s : all) {
    bool duplicate = false;
    for (const auto& kept : result.solutions) {
      if (kept.positivity == Positivity::Trivial && s.positivity == Positivity::Trivial) {
        duplicate = true;
        break;
      }
      const double scale = std::max(kept.sup_norm, s.sup_norm);
      if (trajectory_distance(kept, s) <= opts.dedup_tol * scale) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) result.solutions.push_back(std::move(s));
  }
  return result;
}

EstimateReport derivative_estimate_check_samples(const std::vector<double>& t, const std::vector<State>& x,
                                          double c, double period, double eps) {
  EstimateReport r;
  const double growth = std::exp(std::abs(c) * period) / eps;
  r.max_slack = -kInf;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double bound = x[i].u * growth;
    const double lhs = std::abs(x[i].v);
    const double slack = lhs - bound;
    r.max_slack = std::max(r.max_slack, slack);
    // Relative allowance for integration error in (u, u').
    if (slack > 1e-7 * (lhs + std::abs(bound)) + 1e-300) r.holds = false;
  }
  r.points = static_cast<int>(t.size());
  if (!t.empty()) {
    r.window_lo = t.front();
    r.window_hi = t.back();
  }
  return r;
}

EstimateReport derivative_estimate_check(const Solution& sol, const Interval& I, double eps, int grid) {
  const ProblemSpec& p = sol.problem;
  const double lo = I.lo + eps;
  const double hi = I.hi - eps;
  if (!(eps > 0.0) || !(hi > lo)) {
    throw Error(ErrorCode::InvalidArgument, "[lo + eps, hi - eps] must be nonempty");
  }
  for (int i = 0; i <= 2000; ++i) {
    const double t = I.lo + I.length() * i / 2000.0;
    if (p.weight.eval(std::min(t, std::nextafter(I.hi, I.lo))) < -1e-12) {
      throw Error(ErrorCode::PreconditionViolated, "weight is negative on I");
    }
  }
  if (p.alpha < 0.0) throw Error(ErrorCode::PreconditionViolated, "alpha must be nonnegative");
  if (sol.min_u < -1e-8 * (1.0 + sol.sup_norm)) {
    throw Error(ErrorCode::PreconditionViolated, "solution is not nonnegative");
  }
  std::vector<double> ts(static_cast<std::size_t>(grid));
  std::vector<State> xs(static_cast<std::size_t>(grid));
  for (int i = 0; i < grid; ++i) {
    ts[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (grid - 1);
    xs[static_cast<std::size_t>(i)] = sol.trajectory.at(ts[static_cast<std::size_t>(i)]);
  }
  return derivative_estimate_check_samples(ts, xs, p.c, p.period(), eps);
}

double finite_difference_index_det(const ProblemSpec& p, const ShootingMesh& mesh, double tol) {
  const double T = p.period();
  IntegrateOptions o;
  o.tol = tol;
  Matrix2 DP;
  double det_dp = 1.0;
  for (std::size_t k = 0; k < mesh.times.size(); ++k) {
    const double t0 = mesh.times[k];
    const double t1 = arc_end_time(mesh, k, T);
    const State x = mesh.states[k];
    const double base = std::max(x.norm_inf(), 1e-12);
    Matrix2 J;
    for (int j = 0; j < 2; ++j) {
      const double comp = j == 0 ? x.u : x.v;
      const double h = 1e-6 * std::max(std::abs(comp), 1e-2 * base);
      State plus = x;
      State minus = x;
      (j == 0 ? plus.u : plus.v) += h;
      (j == 0 ? minus.u : minus.v) -= h;
      const State fp = integrate(p, plus, t0, t1, o).back();
      const State fm = integrate(p, minus, t0, t1, o).back();
      J(0, j) = (fp.u - fm.u) / (2.0 * h);
      J(1, j) = (fp.v - fm.v) / (2.0 * h);
    }
    DP = J * DP;
    det_dp *= J.det();
  }
  return det_dp - DP.trace() + 1.0;
}

}  // namespace indef
