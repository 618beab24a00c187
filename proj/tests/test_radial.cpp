#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "indef/errors.hpp"
#include "indef/radial.hpp"

using namespace indef;
using std::numbers::pi;

TEST_CASE("annulus validation") {
  CHECK_THROWS_AS((Annulus{1, 1.0, 2.0}).validate(), Error);
  CHECK_THROWS_AS((Annulus{2, 2.0, 2.0}).validate(), Error);
  CHECK_THROWS_AS((Annulus{3, 0.0, 2.0}).validate(), Error);
  CHECK_NOTHROW((Annulus{3, 0.5, 2.0}).validate());
}

TEST_CASE("h and r are inverse") {
  for (int N : {2, 3, 5}) {
    const Annulus a{N, 0.7, 4.1};
    CHECK(a.radius(0.0) == a.R1);
    CHECK(a.radius(a.T()) == a.R2);
    double prev = a.R1;
    for (int i = 1; i <= 50; ++i) {
      const double r = a.R1 + (a.R2 - a.R1) * i / 50.0;
      CHECK(a.radius(a.h(r)) == doctest::Approx(r).epsilon(1e-12));
      const double ri = a.radius(a.T() * i / 50.0);
      CHECK(ri > prev);
      prev = ri;
    }
  }
}

TEST_CASE("reduction examples") {
  const Annulus two{2, 1.0, std::exp(2 * pi)};
  const ReducedProblem r = reduce(two, RadialWeight::constant(-1.0));
  CHECK(r.T == doctest::Approx(2 * pi).epsilon(1e-14));
  CHECK(r.radius(1.3) == doctest::Approx(std::exp(1.3)).epsilon(1e-13));
  CHECK(r.weight.eval(1.3) == doctest::Approx(-std::exp(2.6)).epsilon(1e-12));

  const Annulus three{3, 1.0, 2.0};
  const ReducedProblem s = reduce(three, RadialWeight::constant(1.0));
  CHECK(s.T == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(s.radius(0.25) == doctest::Approx(1 / 0.75).epsilon(1e-13));
  CHECK(s.weight.eval(0.25) == doctest::Approx(std::pow(1 / 0.75, 4)).epsilon(1e-12));

  const ProblemSpec base;
  const ProblemSpec p = s.problem(base);
  CHECK(p.bc == BoundaryKind::Neumann);
  CHECK(p.period() == doctest::Approx(0.5));
}

TEST_CASE("weight identity between t and r integrals") {
  const Annulus a{4, 0.6, 3.3};
  const RadialWeight Q = RadialWeight::polynomial({0.4, -1.0, 0.25});
  const ReducedProblem red = reduce(a, Q);
  const double in_t = red.weight.integral(0.0, red.T);
  // integral of r^3 (0.4 - r + r^2 / 4) from 0.6 to 3.3
  const auto F = [](double r) { return 0.1 * std::pow(r, 4) - std::pow(r, 5) / 5 + std::pow(r, 6) / 24; };
  CHECK(in_t == doctest::Approx(F(3.3) - F(0.6)).epsilon(1e-10));
  CHECK(check_q_star(a, Q).value == doctest::Approx(F(3.3) - F(0.6)).epsilon(1e-10));
}

TEST_CASE("q star") {
  const Annulus a{2, 1.0, std::exp(2 * pi)};
  const QStarReport r = check_q_star(a, RadialWeight::log_sin_plus_k(-0.5));
  const double e4 = std::exp(4 * pi);
  CHECK(r.value == doctest::Approx(-0.45 * (e4 - 1)).epsilon(1e-10));
  CHECK(r.value == doctest::Approx(-129037.640911494).epsilon(1e-10));
  CHECK(r.holds);
  const Annulus b{3, 1.0, 2.0};
  const QStarReport p = check_q_star(b, RadialWeight::constant(1.0));
  CHECK(p.value == doctest::Approx(7.0 / 3).epsilon(1e-12));
  CHECK_FALSE(p.holds);
  const QStarReport z = check_q_star(b, RadialWeight::constant(0.0));
  CHECK(z.value == 0.0);
  CHECK_FALSE(z.holds);
}

TEST_CASE("constant negative weight reduces to a weight with no positivity interval") {
  const ReducedProblem red = reduce({2, 1.0, 5.0}, RadialWeight::constant(-1.0));
  CHECK(check_q_star({2, 1.0, 5.0}, RadialWeight::constant(-1.0)).holds);
  CHECK_THROWS_AS(find_positivity_interval(red.weight, 0.01), Error);
}

TEST_CASE("lift of the trivial solution") {
  const Annulus a{2, 1.0, std::exp(2 * pi)};
  const RadialWeight Q = RadialWeight::log_sin_plus_k(-0.5, -2.0);
  const ProblemSpec p = reduce(a, Q).problem(ProblemSpec{});
  const Solution triv = find_neumann(p, 0.0);
  const RadialProfile prof = lift(triv, a, Q, 101);
  CHECK(prof.r.front() == a.R1);
  CHECK(prof.r.back() == a.R2);
  CHECK(std::all_of(prof.U.begin(), prof.U.end(), [](double u) { return u == 0.0; }));
  CHECK(prof.residual_abs == 0.0);
  CHECK_THROWS_AS(lift(triv, a, Q, 3), Error);
  CHECK_THROWS_AS(lift(triv, {2, 1.0, 3.0}, Q, 101), Error);
}

TEST_CASE("lift of a positive Neumann solution") {
  // a(t) = sin t - 1/2 after reduction; 2 lambda* of that weight.
  const Annulus a{2, 1.0, std::exp(2 * pi)};
  const RadialWeight Q = RadialWeight::log_sin_plus_k(-0.5, -2.0);
  ProblemSpec p = reduce(a, Q).problem(ProblemSpec{});
  p.lambda = 2710.0685304;
  ShootingOptions o;
  o.newton_tol = 1e-12;
  const MultistartResult ms = multistart(p, default_u0_grid(), {0.0}, MultistartOptions{.shooting = o});
  const auto pos = ms.positive();
  REQUIRE(!pos.empty());
  const RadialProfile prof = lift(*pos.front(), a, Q, 16001);
  CHECK(prof.residual_abs <= 1e-5);
  CHECK(std::abs(prof.dU_R1) <= 1e-6);
  CHECK(std::abs(prof.dU_R2) <= 1e-6);
  CHECK(*std::min_element(prof.U.begin(), prof.U.end()) > 0.0);
}
