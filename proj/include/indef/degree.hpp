#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "indef/ode.hpp"

namespace indef {

/// Continuous planar map evaluated pointwise.
using PlanarMap = std::function<State(State)>;

struct Rectangle {
  double u_lo = -1.0;
  double u_hi = 1.0;
  double v_lo = -1.0;
  double v_hi = 1.0;

  void validate() const;
  bool contains(State x) const;
  bool intersects(const Rectangle& other) const;
  State center() const { return {0.5 * (u_lo + u_hi), 0.5 * (v_lo + v_hi)}; }
  /// Same centre, each side length scaled by (1 - fraction).
  Rectangle shrunk(double fraction) const;
  /// Point at arc-length parameter s in [0, 1), counterclockwise from (u_lo, v_lo).
  State boundary_point(double s) const;
  static Rectangle around(State c, double half_u, double half_v);
};

struct DegreeOptions {
  int n_samples = 64;              // initial uniform boundary samples
  std::optional<double> margin;    // default 1e-8 * max |Phi| on the boundary
  long max_samples = 1L << 20;
  int jobs = 1;                    // workers for the initial sampling pass
};

struct DegreeResult {
  int degree = 0;
  double total_angle = 0.0;
  double min_boundary_displacement = 0.0;
  double max_boundary_displacement = 0.0;
  double margin = 0.0;
  double max_increment = 0.0;
  long samples_used = 0;
  bool certified = false;
};

/// Brouwer degree of `phi` on `rect` from the winding of phi(boundary).
/// Boundary intervals whose angle increment reaches pi/2 are bisected until
/// every increment is below pi/2 or the sample cap is hit (then uncertified).
/// Throws ZeroOnBoundary when some boundary sample has |phi| <= margin.
DegreeResult winding_degree(const PlanarMap& phi, const Rectangle& rect,
                            const DegreeOptions& opts = {});

/// Degree of -f#_lambda on (-d, d), with f# the period mean of the extended
/// nonlinearity. Throws ZeroAtEndpoint if f#(d) or f#(-d) vanishes.
int averaged_map_degree(const ProblemSpec& p, double d);

/// x - P(x), with P the period map of p integrated at `tol`.
PlanarMap displacement_map(const ProblemSpec& p, double tol = 1e-11);

/// Planar winding of x - P(x) for u'' = F(t, u, u') carries the opposite
/// sign of the scalar reduction (Id - P behaves like (-v, f#(u)) near an
/// equilibrium of the averaged problem). Converts one to the other.
inline int coincidence_index(int planar_degree) { return -planar_degree; }

struct LedgerReport {
  DegreeResult outer;
  std::vector<DegreeResult> cells;
  int cell_sum = 0;
  bool certified = false;
  bool additivity_ok = false;
  long interior_samples = 0;
  double min_uncovered_displacement = 0.0;

  std::string to_json() const;
};

struct LedgerOptions {
  DegreeOptions degree;
  int interior_grid = 64;  // per side, for the uncovered-zero scan
  int jobs = 1;
};

/// Winding degree on `outer` and on each cell; checks deg(outer) = sum.
/// Throws InvalidArgument for overlapping or uncontained cells and
/// UncoveredZero if the interior scan finds |phi| <= margin outside all cells.
LedgerReport additivity_ledger(const PlanarMap& phi, const Rectangle& outer,
                               const std::vector<Rectangle>& cells, const LedgerOptions& opts = {});

}  // namespace indef
