#include <cmath>
#include <numbers>

#include "doctest.h"
#include "indef/degree.hpp"
#include "indef/errors.hpp"
#include "indef/shooting.hpp"

using namespace indef;
using std::numbers::pi;

namespace {

ProblemSpec reference(double lambda) {
  ProblemSpec p;
  p.lambda = lambda;
  return p;
}

PlanarMap linear(double a, double b, double c, double d) {
  return [=](State x) { return State{a * x.u + b * x.v, c * x.u + d * x.v}; };
}

}  // namespace

TEST_CASE("rectangle geometry") {
  const Rectangle r{-1, 3, -2, 2};
  CHECK_NOTHROW(r.validate());
  CHECK_THROWS_AS(Rectangle({1, -1, 0, 1}).validate(), Error);
  CHECK(r.contains({0, 0}));
  CHECK_FALSE(r.contains({4, 0}));
  CHECK(r.center().u == 1.0);
  CHECK(r.boundary_point(0.0).u == -1.0);
  CHECK(r.boundary_point(0.0).v == -2.0);
  const Rectangle s = r.shrunk(0.1);
  CHECK(s.u_lo == doctest::Approx(-0.8));
  CHECK(s.v_hi == doctest::Approx(1.8));
  CHECK(r.intersects(Rectangle{2, 5, 1, 4}));
  CHECK_FALSE(r.intersects(Rectangle{4, 5, 1, 4}));
}

TEST_CASE("winding degree of simple maps") {
  const Rectangle sq{-1, 1, -1, 1};
  const DegreeResult id = winding_degree([](State x) { return x; }, sq);
  CHECK(id.degree == 1);
  CHECK(id.certified);

  const auto square = [](State x) { return State{x.u * x.u - x.v * x.v, 2 * x.u * x.v}; };
  CHECK(winding_degree(square, sq).degree == 2);

  const auto conj = [](State x) { return State{x.u, -x.v}; };
  CHECK(winding_degree(conj, sq).degree == -1);

  CHECK(winding_degree([](State x) { return State{x.u + 5, x.v}; }, sq).degree == 0);
}

TEST_CASE("sign convention for linear maps") {
  const Rectangle sq{-0.5, 0.7, -0.3, 0.9};
  CHECK(winding_degree(linear(2, 0, 0, 3), sq).degree == 1);
  CHECK(winding_degree(linear(-2, 0, 0, 3), sq).degree == -1);
  CHECK(winding_degree(linear(0, -1, 1, 0), sq).degree == 1);
  CHECK(coincidence_index(1) == -1);
}

TEST_CASE("degree is an integer and stable under shrinking") {
  const auto phi = [](State x) {
    return State{x.u * x.u * x.u - x.v + 0.1, x.u + std::sin(x.v)};
  };
  const Rectangle r{-2, 2, -2, 2};
  const DegreeResult a = winding_degree(phi, r);
  REQUIRE(a.certified);
  CHECK(std::abs(a.total_angle / (2 * pi) - a.degree) < 0.05);
  const DegreeResult b = winding_degree(phi, r.shrunk(0.1));
  CHECK(b.degree == a.degree);
}

TEST_CASE("zero on the boundary") {
  const Rectangle r{0, 1, -1, 1};
  CHECK_THROWS_AS(winding_degree([](State x) { return x; }, r), Error);
  try {
    winding_degree([](State x) { return x; }, r);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroOnBoundary);
  }
}

TEST_CASE("refinement when the coarse pass rotates too fast") {
  const auto cube = [](State x) {
    return State{x.u * x.u * x.u - 3 * x.u * x.v * x.v, 3 * x.u * x.u * x.v - x.v * x.v * x.v};
  };
  DegreeOptions o;
  o.n_samples = 8;
  const DegreeResult d = winding_degree(cube, {-1, 1, -1, 1}, o);
  CHECK(d.degree == 3);
  CHECK(d.samples_used > 8);
  CHECK(d.max_increment < pi / 2);
}

TEST_CASE("averaged map degree") {
  ProblemSpec p = reference(5.0);
  CHECK(averaged_map_degree(p, 0.5) == 1);
  p.weight = PeriodicWeight::sin_plus_k(0.5);
  CHECK(averaged_map_degree(p, 0.5) == 0);
  p.nonlinearity = Nonlinearity::power(2.0);
  p.weight = PeriodicWeight::sin_plus_k(-0.5);
  CHECK_THROWS_AS(averaged_map_degree(p, 0.0), Error);
  p.weight = PeriodicWeight::sin_plus_k(0.0);
  CHECK_THROWS_AS(averaged_map_degree(p, 0.5), Error);
}

TEST_CASE("additivity ledger") {
  const PlanarMap id = [](State x) { return x; };
  const LedgerReport r = additivity_ledger(id, {-1, 1, -1, 1}, {Rectangle{-0.2, 0.2, -0.2, 0.2}});
  CHECK(r.outer.degree == 1);
  CHECK(r.cell_sum == 1);
  CHECK(r.additivity_ok);
  CHECK(r.certified);

  const auto two = [](State x) { return State{x.u * x.u - 0.25, x.v}; };
  const LedgerReport t = additivity_ledger(two, {-1, 1, -1, 1},
                                           {Rectangle{-0.8, -0.2, -0.3, 0.3}, Rectangle{0.2, 0.8, -0.3, 0.3}});
  CHECK(t.outer.degree == 0);
  CHECK(t.cells[0].degree == -1);
  CHECK(t.cells[1].degree == 1);
  CHECK(t.additivity_ok);

  SUBCASE("uncovered zero") {
    try {
      additivity_ledger(two, {-1, 1, -1, 1}, {Rectangle{0.2, 0.8, -0.3, 0.3}});
      FAIL("expected UncoveredZero");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UncoveredZero);
    }
  }
  SUBCASE("overlapping cells") {
    CHECK_THROWS_AS(additivity_ledger(id, {-1, 1, -1, 1},
                                      {Rectangle{-0.5, 0.5, -0.5, 0.5}, Rectangle{0, 0.6, 0, 0.6}}),
                    Error);
  }
  SUBCASE("cell outside") {
    CHECK_THROWS_AS(additivity_ledger(id, {-1, 1, -1, 1}, {Rectangle{-0.5, 1.5, -0.5, 0.5}}), Error);
  }
  CHECK(r.to_json().find("additivity_ok") != std::string::npos);
}

TEST_CASE("trivial fixed point of the reference problem") {
  // The cell must exclude the small positive solution near (2.5e-4, 1.4e-4).
  const Rectangle cell{-1e-4, 1e-4, -1e-4, 1e-4};
  const DegreeResult d = winding_degree(displacement_map(reference(2710.0685304)), cell);
  CHECK(d.certified);
  CHECK(coincidence_index(d.degree) == 1);
  const DegreeResult low = winding_degree(displacement_map(reference(1e-3)), {-0.5, 0.5, -0.5, 0.5});
  CHECK(coincidence_index(low.degree) == 1);
}

TEST_CASE("displacement map degree matches the Newton index at an isolated solution") {
  const ProblemSpec p = reference(2710.0685304);
  const Solution s = find_periodic(p, State{0.00025288450190801828, 0.00014391207809679241});
  REQUIRE(s.counts_as_positive());
  const double h = 0.3 * s.initial_state.norm_inf();
  const DegreeResult d = winding_degree(displacement_map(p), Rectangle::around(s.initial_state, h, h));
  CHECK(d.degree == s.index);
}
