#include <cmath>
#include <numbers>

#include "doctest.h"
#include "indef/errors.hpp"
#include "indef/ode.hpp"

using namespace indef;
using std::numbers::pi;

namespace {

ProblemSpec reference() {
  ProblemSpec p;
  p.weight = PeriodicWeight::sin_plus_k(-0.5);
  p.nonlinearity = Nonlinearity::arctan_pow(2.0);
  return p;
}

// Classical RK4 with a fixed step, u' = v, v' = -c v - f(t, u).
State rk4(const ProblemSpec& p, State x, double t0, double t1, int n) {
  const double h = (t1 - t0) / n;
  const auto F = [&](double t, State s) { return State{s.v, -p.c * s.v - extended_rhs(p, t, s.u)}; };
  double t = t0;
  for (int i = 0; i < n; ++i) {
    const State k1 = F(t, x);
    const State k2 = F(t + h / 2, x + (h / 2) * k1);
    const State k3 = F(t + h / 2, x + (h / 2) * k2);
    const State k4 = F(t + h, x + h * k3);
    x = x + (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
  return x;
}

}  // namespace

TEST_CASE("problem validation") {
  ProblemSpec p = reference();
  CHECK_NOTHROW(p.validate());
  p.lambda = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = reference();
  p.alpha = -1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = reference();
  p.theta = 1.5;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("extended right-hand side") {
  ProblemSpec p = reference();
  CHECK(extended_rhs(p, 0.3, -2.0) == 2.0);
  CHECK(extended_rhs(p, 0.3, 0.0) == 0.0);
  p.alpha = 0.7;
  CHECK(extended_rhs(p, 0.3, 0.0) == doctest::Approx(0.7));
  CHECK(extended_rhs(p, 0.3, -2.0) == doctest::Approx(2.7));
  p.alpha = 0.0;
  CHECK(extended_rhs(p, pi / 2, 1.0) == doctest::Approx(0.5 * pi / 4));
}

TEST_CASE("integrate: vanishing forcing and constants") {
  ProblemSpec p = reference();
  p.lambda = 1e-12;
  const Trajectory tr = integrate(p, {1.0, 0.0}, 0.0, 2 * pi);
  CHECK(std::abs(tr.back().u - 1.0) <= 1e-8);
  CHECK(std::abs(tr.back().v) <= 1e-8);
  CHECK(tr.t_begin() == 0.0);
  CHECK(tr.t_end() == doctest::Approx(2 * pi));
  for (std::size_t i = 1; i < tr.times.size(); ++i) CHECK(tr.times[i] > tr.times[i - 1]);

  ProblemSpec z = reference();
  z.c = 1.0;
  z.weight = PeriodicWeight::piecewise({0.0}, {0.0}, 2 * pi);
  const Trajectory tz = integrate(z, {0.8, 0.0}, 0.0, 2 * pi);
  CHECK(tz.back().u == 0.8);
  CHECK(tz.back().v == 0.0);
}

TEST_CASE("integrate agrees with a fixed-step reference") {
  ProblemSpec p = reference();
  p.weight = PeriodicWeight::constant(-1.0);
  p.nonlinearity = Nonlinearity::rational_bump();
  IntegrateOptions o;
  o.tol = 1e-13;
  const State got = integrate(p, {1.0, 0.0}, 0.0, 0.1, o).back();
  const State ref = rk4(p, {1.0, 0.0}, 0.0, 0.1, 20000);
  CHECK(std::abs(got.u - ref.u) <= 1e-9);
  CHECK(std::abs(got.v - ref.v) <= 1e-9);
}

TEST_CASE("integrate crosses u = 0 with branch switching") {
  ProblemSpec p = reference();
  p.lambda = 5.0;
  IntegrateOptions o;
  o.tol = 1e-12;
  const State got = integrate(p, {0.3, -2.0}, 0.0, 2 * pi, o).back();
  const State ref = rk4(p, {0.3, -2.0}, 0.0, 2 * pi, 400000);
  // RK4 straddles the kink at u = 0, so its own error dominates here.
  CHECK(std::abs(got.u - ref.u) <= 1e-6);
  CHECK(std::abs(got.v - ref.v) <= 1e-6);
}

TEST_CASE("tolerance convergence and order") {
  ProblemSpec p = reference();
  p.lambda = 2.0;
  p.c = 0.3;
  for (double tol : {1e-6, 1e-8, 1e-10}) {
    IntegrateOptions a, b;
    a.tol = tol;
    b.tol = tol / 2;
    const State xa = integrate(p, {0.9, 0.1}, 0.0, 2 * pi, a).back();
    const State xb = integrate(p, {0.9, 0.1}, 0.0, 2 * pi, b).back();
    CHECK((xa - xb).norm_inf() < 10 * tol);
  }
  ProblemSpec q = reference();
  q.lambda = 1e-12;
  for (double tol : {1e-6, 1e-8, 1e-10}) {
    IntegrateOptions o;
    o.tol = tol;
    const State x = integrate(q, {2.0, 0.0}, 0.0, 2 * pi, o).back();
    CHECK(std::abs(x.u - 2.0) <= 10 * tol);
  }
}

TEST_CASE("branch consistency for positive trajectories") {
  ProblemSpec p = reference();
  p.lambda = 0.5;
  ProblemSpec q = p;
  q.left_branch = [](double s) { return -5.0 * s + s * s; };
  const State a = integrate(p, {1.0, 0.0}, 0.0, 2 * pi).back();
  const State b = integrate(q, {1.0, 0.0}, 0.0, 2 * pi).back();
  CHECK(integrate(p, {1.0, 0.0}, 0.0, 2 * pi).u_range().first > 0.0);
  CHECK((a - b).norm_inf() == 0.0);
}

TEST_CASE("variational equations") {
  ProblemSpec z = reference();
  z.c = 0.7;
  z.weight = PeriodicWeight::piecewise({0.0}, {0.0}, 2.0);
  const auto [tz, M0] = integrate_with_variational(z, {1.0, 0.0}, 0.0, 2.0);
  const double e = std::exp(-0.7 * 2.0);
  CHECK(M0(0, 0) == doctest::Approx(1.0));
  CHECK(M0(0, 1) == doctest::Approx((1.0 - e) / 0.7).epsilon(1e-9));
  CHECK(M0(1, 0) == doctest::Approx(0.0));
  CHECK(M0(1, 1) == doctest::Approx(e).epsilon(1e-9));

  for (double c : {-0.5, 0.0, 0.5}) {
    ProblemSpec p = reference();
    p.c = c;
    p.lambda = 3.0;
    const auto [tr, M] = integrate_with_variational(p, {0.4, -0.3}, 0.0, 2 * pi);
    CHECK(std::abs(M.det() - std::exp(-c * 2 * pi)) <= 1e-7 * std::exp(std::abs(c) * 2 * pi));
  }

  ProblemSpec k = reference();
  k.weight = PeriodicWeight::constant(-1.0);
  const State x0{0.5, 0.2};
  IntegrateOptions o;
  o.tol = 1e-12;
  const auto [tk, Mk] = integrate_with_variational(k, x0, 0.0, 0.5, o);
  const double h = 1e-6;
  for (int j = 0; j < 2; ++j) {
    State xp = x0, xm = x0;
    (j == 0 ? xp.u : xp.v) += h;
    (j == 0 ? xm.u : xm.v) -= h;
    const State fp = integrate(k, xp, 0.0, 0.5, o).back();
    const State fm = integrate(k, xm, 0.0, 0.5, o).back();
    CHECK(std::abs((fp.u - fm.u) / (2 * h) - Mk(0, j)) <= 1e-5);
    CHECK(std::abs((fp.v - fm.v) / (2 * h) - Mk(1, j)) <= 1e-5);
  }
}

TEST_CASE("trajectory dense output") {
  ProblemSpec p = reference();
  p.lambda = 2.0;
  IntegrateOptions o;
  o.tol = 1e-12;
  const Trajectory tr = integrate(p, {0.5, 0.0}, 0.0, 2 * pi, o);
  const State mid = tr.at(1.0);
  const State direct = integrate(p, {0.5, 0.0}, 0.0, 1.0, o).back();
  CHECK(std::abs(mid.u - direct.u) <= 1e-9);
  CHECK(std::abs(mid.v - direct.v) <= 1e-9);
  CHECK(tr.sample(11).size() == 11);
  CHECK_THROWS_AS(integrate(p, {0.5, 0.0}, 1.0, 1.0), Error);
}
