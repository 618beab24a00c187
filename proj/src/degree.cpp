#include "indef/degree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <numbers>

#include "json.hpp"

#include "indef/errors.hpp"
#include "indef/parallel.hpp"

namespace indef {

void Rectangle::validate() const {
  if (!(u_lo < u_hi) || !(v_lo < v_hi)) {
    throw Error(ErrorCode::InvalidArgument, "rectangle needs u_lo < u_hi and v_lo < v_hi");
  }
}

bool Rectangle::contains(State x) const {
  return x.u >= u_lo && x.u <= u_hi && x.v >= v_lo && x.v <= v_hi;
}

bool Rectangle::intersects(const Rectangle& o) const {
  return u_lo <= o.u_hi && o.u_lo <= u_hi && v_lo <= o.v_hi && o.v_lo <= v_hi;
}

Rectangle Rectangle::shrunk(double fraction) const {
  const double du = 0.5 * fraction * (u_hi - u_lo);
  const double dv = 0.5 * fraction * (v_hi - v_lo);
  return {u_lo + du, u_hi - du, v_lo + dv, v_hi - dv};
}

State Rectangle::boundary_point(double s) const {
  const double w = u_hi - u_lo;
  const double h = v_hi - v_lo;
  const double per = 2.0 * (w + h);
  double l = (s - std::floor(s)) * per;
  if (l < w) return {u_lo + l, v_lo};
  l -= w;
  if (l < h) return {u_hi, v_lo + l};
  l -= h;
  if (l < w) return {u_hi - l, v_hi};
  l -= w;
  return {u_lo, v_hi - l};
}

Rectangle Rectangle::around(State c, double half_u, double half_v) {
  return {c.u - half_u, c.u + half_u, c.v - half_v, c.v + half_v};
}

namespace {

constexpr double kPi = std::numbers::pi;

double wrapped_increment(State a, State b) {
  double d = std::atan2(b.v, b.u) - std::atan2(a.v, a.u);
  while (d > kPi) d -= 2.0 * kPi;
  while (d <= -kPi) d += 2.0 * kPi;
  return d;
}

struct Sample {
  double s;
  State value;
};

State checked_eval(const PlanarMap& phi, State x) {
  const State y = phi(x);
  if (!std::isfinite(y.u) || !std::isfinite(y.v)) {
    throw Error(ErrorCode::InvalidArgument, "planar map returned a non-finite value");
  }
  return y;
}

}  // namespace

DegreeResult winding_degree(const PlanarMap& phi, const Rectangle& rect, const DegreeOptions& opts) {
  rect.validate();
  const int n0 = std::max(8, opts.n_samples);
  // Corners sit at fixed parameters; include them so every side is sampled.
  const double per = 2.0 * ((rect.u_hi - rect.u_lo) + (rect.v_hi - rect.v_lo));
  std::vector<double> params;
  for (int i = 0; i < n0; ++i) params.push_back(static_cast<double>(i) / n0);
  const double w = (rect.u_hi - rect.u_lo) / per;
  const double h = (rect.v_hi - rect.v_lo) / per;
  for (double c : {w, w + h, 2.0 * w + h}) params.push_back(c);
  std::sort(params.begin(), params.end());
  params.erase(std::unique(params.begin(), params.end()), params.end());

  std::vector<State> values(params.size());
  parallel_for(params.size(), opts.jobs,
               [&](std::size_t i) { values[i] = checked_eval(phi, rect.boundary_point(params[i])); });

  std::list<Sample> ring;
  double max_abs = 0.0;
  double min_abs = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < params.size(); ++i) {
    ring.push_back({params[i], values[i]});
    const double r = std::hypot(values[i].u, values[i].v);
    max_abs = std::max(max_abs, r);
    min_abs = std::min(min_abs, r);
  }
  DegreeResult res;
  res.margin = opts.margin ? *opts.margin : 1e-8 * max_abs;
  const auto check_margin = [&] {
    if (!(min_abs > res.margin)) {
      throw Error(ErrorCode::ZeroOnBoundary, "|Phi| <= margin on the rectangle boundary");
    }
  };
  check_margin();

  long used = static_cast<long>(ring.size());
  bool capped = false;
  // Refine by bisecting offending intervals; the list is closed cyclically.
  auto it = ring.begin();
  while (it != ring.end()) {
    auto next = std::next(it);
    const bool wrap = next == ring.end();
    const Sample& b = wrap ? ring.front() : *next;
    const double sb = wrap ? b.s + 1.0 : b.s;
    if (std::abs(wrapped_increment(it->value, b.value)) < kPi / 2.0) {
      ++it;
      continue;
    }
    const double mid = 0.5 * (it->s + sb);
    if (used >= opts.max_samples || !(mid > it->s && mid < sb)) {
      capped = true;
      ++it;
      continue;
    }
    const double sm = mid >= 1.0 ? mid - 1.0 : mid;
    const State val = checked_eval(phi, rect.boundary_point(sm));
    const double r = std::hypot(val.u, val.v);
    min_abs = std::min(min_abs, r);
    max_abs = std::max(max_abs, r);
    check_margin();
    ++used;
    // Keep the parameter monotone within the list even across the wrap.
    ring.insert(next, {mid, val});
  }

  double total = 0.0;
  double max_inc = 0.0;
  for (auto a = ring.begin(); a != ring.end(); ++a) {
    auto b = std::next(a);
    const State vb = b == ring.end() ? ring.front().value : b->value;
    const double d = wrapped_increment(a->value, vb);
    total += d;
    max_inc = std::max(max_inc, std::abs(d));
  }
  res.total_angle = total;
  res.degree = static_cast<int>(std::lround(total / (2.0 * kPi)));
  res.min_boundary_displacement = min_abs;
  res.max_boundary_displacement = max_abs;
  res.max_increment = max_inc;
  res.samples_used = used;
  res.certified = !capped && max_inc < kPi / 2.0 && min_abs > res.margin;
  return res;
}

int averaged_map_degree(const ProblemSpec& p, double d) {
  if (!(d > 0.0)) throw Error(ErrorCode::InvalidArgument, "d must be positive");
  const double mean = p.weight.mean();
  const double fpos = p.theta * p.lambda * mean * p.nonlinearity.g(d);
  const double fneg = d;  // left branch: -(-d)
  if (fpos == 0.0 || fneg == 0.0) {
    throw Error(ErrorCode::ZeroAtEndpoint, "averaged map vanishes at an endpoint");
  }
  const double left = -fneg;
  const double right = -fpos;
  if (left < 0.0 && right > 0.0) return 1;
  if (left > 0.0 && right < 0.0) return -1;
  return 0;
}

PlanarMap displacement_map(const ProblemSpec& p, double tol) {
  return [p, tol](State x) {
    IntegrateOptions o;
    o.tol = tol;
    const State y = integrate(p, x, 0.0, p.period(), o).back();
    return x - y;
  };
}

std::string LedgerReport::to_json() const {
  nlohmann::json j;
  j["outer_degree"] = outer.degree;
  std::vector<int> degs;
  for (const auto& c : cells) degs.push_back(c.degree);
  j["cell_degrees"] = degs;
  j["cell_sum"] = cell_sum;
  j["certified"] = certified;
  j["additivity_ok"] = additivity_ok;
  j["interior_samples"] = interior_samples;
  j["min_uncovered_displacement"] = min_uncovered_displacement;
  return j.dump(2);
}

LedgerReport additivity_ledger(const PlanarMap& phi, const Rectangle& outer,
                               const std::vector<Rectangle>& cells, const LedgerOptions& opts) {
  outer.validate();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    cells[i].validate();
    if (!(cells[i].u_lo > outer.u_lo && cells[i].u_hi < outer.u_hi && cells[i].v_lo > outer.v_lo &&
          cells[i].v_hi < outer.v_hi)) {
      throw Error(ErrorCode::InvalidArgument, "cell not strictly inside the outer rectangle");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (cells[i].intersects(cells[j])) throw Error(ErrorCode::InvalidArgument, "cells overlap");
    }
  }
  LedgerReport rep;
  DegreeOptions dopt = opts.degree;
  dopt.jobs = std::max(dopt.jobs, opts.jobs);
  rep.outer = winding_degree(phi, outer, dopt);

  // Interior scan on a node grid. A grid square lying outside every cell
  // whose corner values wind around 0 also flags an uncovered zero.
  const int n = std::max(2, opts.interior_grid);
  const auto node = [&](int i, int k) {
    return State{outer.u_lo + (outer.u_hi - outer.u_lo) * i / n,
                 outer.v_lo + (outer.v_hi - outer.v_lo) * k / n};
  };
  const auto covered = [&](State x) {
    return std::any_of(cells.begin(), cells.end(), [&](const Rectangle& c) { return c.contains(x); });
  };
  const std::size_t side = static_cast<std::size_t>(n + 1);
  std::vector<State> grid(side * side);
  std::vector<char> ok(side * side, 0);
  parallel_for(grid.size(), opts.jobs, [&](std::size_t idx) {
    const State x = node(static_cast<int>(idx % side), static_cast<int>(idx / side));
    try {
      grid[idx] = phi(x);
      ok[idx] = std::isfinite(grid[idx].u) && std::isfinite(grid[idx].v);
    } catch (const Error&) {
      ok[idx] = 0;
    }
  });
  rep.min_uncovered_displacement = std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const State x = node(static_cast<int>(idx % side), static_cast<int>(idx / side));
    if (covered(x) || !ok[idx]) continue;
    ++rep.interior_samples;
    const double r = std::hypot(grid[idx].u, grid[idx].v);
    rep.min_uncovered_displacement = std::min(rep.min_uncovered_displacement, r);
    if (!(r > rep.outer.margin)) {
      throw Error(ErrorCode::UncoveredZero, "|Phi| <= margin outside all cells");
    }
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      const Rectangle sq{node(i, k).u, node(i + 1, k).u, node(i, k).v, node(i, k + 1).v};
      if (std::any_of(cells.begin(), cells.end(), [&](const Rectangle& c) { return c.intersects(sq); })) {
        continue;
      }
      const std::size_t c0 = static_cast<std::size_t>(k) * side + static_cast<std::size_t>(i);
      const std::size_t ids[4] = {c0, c0 + 1, c0 + 1 + side, c0 + side};
      if (!std::all_of(std::begin(ids), std::end(ids), [&](std::size_t q) { return ok[q] != 0; })) continue;
      double turn = 0.0;
      for (int e = 0; e < 4; ++e) turn += wrapped_increment(grid[ids[e]], grid[ids[(e + 1) % 4]]);
      if (std::lround(turn / (2.0 * kPi)) != 0) {
        throw Error(ErrorCode::UncoveredZero, "corner winding suggests a zero outside all cells");
      }
    }
  }

  rep.certified = rep.outer.certified;
  for (const auto& c : cells) {
    rep.cells.push_back(winding_degree(phi, c, dopt));
    rep.cell_sum += rep.cells.back().degree;
    rep.certified = rep.certified && rep.cells.back().certified;
  }
  rep.additivity_ok = rep.outer.degree == rep.cell_sum;
  return rep;
}

}  // namespace indef
