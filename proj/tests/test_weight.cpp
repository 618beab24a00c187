#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "indef/errors.hpp"
#include "indef/weight.hpp"

using namespace indef;
using std::numbers::pi;

TEST_CASE("weight eval") {
  const auto w = PeriodicWeight::sin_plus_k(-0.5);
  CHECK(eval(w, pi / 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(eval(w, pi / 2 + 2 * pi) == doctest::Approx(0.5).epsilon(1e-14));
  const auto pw = PeriodicWeight::piecewise({0.0, 1.0}, {2.0, -1.0}, 3.0);
  CHECK(eval(pw, 2.0) == -1.0);
  CHECK(eval(pw, 1.0) == -1.0);  // right limit at a breakpoint
  CHECK(eval(pw, 0.5) == 2.0);
  CHECK(eval(pw, 3.5) == 2.0);
  CHECK(eval(pw, -0.5) == -1.0);
}

TEST_CASE("weight construction errors") {
  CHECK_THROWS_AS(PeriodicWeight::sin_plus_k(0.0, 0.0), Error);
  CHECK_THROWS_AS(PeriodicWeight::piecewise({0.0, 4.0}, {1.0, 2.0}, 3.0), Error);
  CHECK_THROWS_AS(PeriodicWeight::piecewise({1.0, 0.5}, {1.0, 2.0}, 3.0), Error);
  CHECK_THROWS_AS(PeriodicWeight::piecewise({0.0}, {1.0, 2.0}, 3.0), Error);
}

TEST_CASE("weight integrals") {
  const auto w = PeriodicWeight::sin_plus_k(-0.5);
  CHECK(integral_over(w, 0.0, 2 * pi) == doctest::Approx(-pi).epsilon(1e-12));
  const double core = std::cos(pi / 3) - std::cos(2 * pi / 3) - 0.5 * (pi / 3);
  CHECK(std::abs(integral_over(w, pi / 3, 2 * pi / 3) - core) <= 1e-10);
  const auto pw = PeriodicWeight::piecewise({0.0, 1.0}, {2.0, -1.0}, 3.0);
  // 2 * 1 + (-1) * 2.
  CHECK(std::abs(integral_over(pw, 0.0, 3.0)) <= 1e-15);
  CHECK(integral_over(pw, 0.5, 4.5) == doctest::Approx(2.0 * 0.5 - 2.0 + 2.0 * 1.0 - 0.5).epsilon(1e-14));
  const auto comp = PeriodicWeight::composite([](double t) { return t * t; }, 2.0);
  CHECK(integral_over(comp, 0.0, 2.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
  CHECK(w.l1_norm() == doctest::Approx(2 * std::sqrt(3.0) + pi / 3).epsilon(1e-10));
}

TEST_CASE("weight integral additivity") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  const auto w = PeriodicWeight::sin_plus_k(-0.3, 3.0);
  const auto pw = PeriodicWeight::piecewise({0.0, 0.7, 1.9}, {1.5, -0.4, 0.2}, 2.5);
  const auto comp = PeriodicWeight::composite([](double t) { return std::exp(std::sin(t)) - 1.2; }, 2 * pi);
  for (const auto* x : {&w, &pw, &comp}) {
    for (int i = 0; i < 50; ++i) {
      double a = U(rng), b = U(rng), c = U(rng);
      if (a > c) std::swap(a, c);
      b = std::clamp(b, a, c);
      const double whole = x->integral(a, c);
      const double parts = x->integral(a, b) + x->integral(b, c);
      CHECK(std::abs(whole - parts) <= 1e-12 * std::max(1.0, std::abs(whole)));
    }
  }
}

TEST_CASE("weight periodicity and sign decomposition") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 100.0);
  const auto w = PeriodicWeight::sin_plus_k(-0.5);
  const auto [plus, minus] = sign_decompose(w);
  const auto pw = PeriodicWeight::piecewise({0.0, 1.0}, {2.0, -1.0}, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const double t = U(rng);
    CHECK(std::abs(pw.eval(t + 3.0) - pw.eval(t)) == 0.0);
    CHECK(plus.eval(t) - minus.eval(t) == doctest::Approx(w.eval(t)).epsilon(1e-15));
    CHECK(plus.eval(t) * minus.eval(t) == 0.0);
    CHECK(plus.eval(t) >= 0.0);
    CHECK(minus.eval(t) >= 0.0);
  }
  // The sinusoid itself is periodic up to the rounding of t mod T.
  for (int i = 0; i < 1000; ++i) {
    const double t = U(rng);
    CHECK(std::abs(w.eval(t + 2 * pi) - w.eval(t)) <= 1e-13);
  }
  const auto [cp, cm] = sign_decompose(PeriodicWeight::constant(-3.0));
  CHECK(cp.eval(1.0) == 0.0);
  CHECK(cm.eval(1.0) == 3.0);
  const auto [sp, sm] = sign_decompose(PeriodicWeight::sin_plus_k(0.0));
  CHECK(sp.eval(pi / 2) == doctest::Approx(1.0));
  CHECK(sm.eval(pi / 2) == 0.0);
  CHECK(sp.eval(3 * pi / 2) == 0.0);
  CHECK(sm.eval(3 * pi / 2) == doctest::Approx(1.0));
}

TEST_CASE("positivity interval") {
  const auto w = PeriodicWeight::sin_plus_k(-0.5);
  const Interval I = find_positivity_interval(w, 0.1);
  CHECK(std::abs(I.lo - pi / 6) <= 1e-10);
  CHECK(std::abs(I.hi - 5 * pi / 6) <= 1e-10);
  double m = 1e300;
  for (int i = 0; i <= 10000; ++i) m = std::min(m, w.eval(I.lo + I.length() * i / 10000.0));
  CHECK(m >= -1e-9);
  CHECK_THROWS_AS(find_positivity_interval(PeriodicWeight::constant(-1.0), 0.1), Error);
  const auto pw = PeriodicWeight::piecewise({0.0, 1.0}, {2.0, -1.0}, 3.0);
  const Interval J = find_positivity_interval(pw, 1.0);
  CHECK(J.lo == doctest::Approx(0.0));
  CHECK(J.hi == doctest::Approx(1.0));
  CHECK_THROWS_AS(find_positivity_interval(pw, 3.0), Error);
}

TEST_CASE("sign change roots") {
  const auto roots = sign_change_roots(PeriodicWeight::sin_plus_k(-0.5));
  REQUIRE(roots.size() == 2);
  CHECK(roots[0] == doctest::Approx(pi / 6).epsilon(1e-10));
  CHECK(roots[1] == doctest::Approx(5 * pi / 6).epsilon(1e-10));
}
