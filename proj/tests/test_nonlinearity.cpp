#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "indef/errors.hpp"
#include "indef/nonlinearity.hpp"

using namespace indef;

TEST_CASE("g evaluation") {
  const auto at = Nonlinearity::arctan_pow(2.0);
  const auto rb = Nonlinearity::rational_bump();
  const auto pw = Nonlinearity::power(2.0);
  CHECK(eval_g(at, 1.0) == doctest::Approx(std::numbers::pi / 4));
  CHECK(eval_g(rb, 2.0) == doctest::Approx(0.8));
  for (const auto* g : {&at, &rb, &pw}) CHECK(eval_g(*g, 0.0) == 0.0);
  CHECK_THROWS_AS(eval_g(at, -1e-3), Error);
  CHECK_THROWS_AS(eval_gprime(at, -1.0), Error);
}

TEST_CASE("g derivative") {
  const auto at = Nonlinearity::arctan_pow(2.0);
  const auto rb = Nonlinearity::rational_bump();
  CHECK(eval_gprime(at, 0.0) == 0.0);
  CHECK(eval_gprime(at, 1.0) == doctest::Approx(1.0));
  CHECK(eval_gprime(rb, 1.0) == doctest::Approx(0.5));
  const auto user = Nonlinearity::user([](double s) { return s * s / (1.0 + s); });
  CHECK_FALSE(user.derivative_available());
  CHECK(eval_gprime(user, 1.0) == doctest::Approx(0.75).epsilon(1e-8));
}

TEST_CASE("derivative consistency and positivity sampling") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> L(-3.0, 3.0);
  std::uniform_real_distribution<double> P(-12.0, 6.0);
  for (const auto& g : {Nonlinearity::arctan_pow(2.0), Nonlinearity::arctan_pow(0.7), Nonlinearity::rational_bump(),
                        Nonlinearity::power(1.5)}) {
    for (int i = 0; i < 100; ++i) {
      const double s = std::pow(10.0, L(rng));
      const double h = 1e-6 * std::max(1.0, s);
      const double fd = (eval_g(g, s + h) - eval_g(g, s - h)) / (2 * h);
      CHECK(std::abs(eval_gprime(g, s) - fd) <= 1e-5 * (1.0 + std::abs(eval_gprime(g, s))));
      CHECK(eval_g(g, std::pow(10.0, P(rng))) > 0.0);
    }
  }
}

TEST_CASE("hypothesis probes") {
  const auto at = check_hypotheses(Nonlinearity::arctan_pow(2.0));
  CHECK(at.g0_pass);
  CHECK(at.ginf_pass);
  CHECK(at.reg_osc_zero_pass);
  CHECK(at.reg_osc_inf_pass);
  CHECK(at.heuristic);
  CHECK(at.g0_probe >= 0.0);
  const auto lin = check_hypotheses(Nonlinearity::power(1.0));
  CHECK_FALSE(lin.g0_pass);
  const auto rb = check_hypotheses(Nonlinearity::rational_bump());
  CHECK(rb.g0_pass);
  CHECK(rb.ginf_pass);
  CHECK(rb.reg_osc_zero_pass);
  CHECK(rb.reg_osc_inf_pass);
}

TEST_CASE("sup g' and min g") {
  const auto at = Nonlinearity::arctan_pow(2.0);
  const auto rb = Nonlinearity::rational_bump();
  CHECK(sup_gprime_on(at, 0.0) == doctest::Approx(1.5 * std::pow(3.0, -0.25)).epsilon(1e-9));
  // 2s/(1+s^2)^2 peaks at s = 1/sqrt(3).
  CHECK(sup_gprime_on(rb, 0.0) == doctest::Approx(3.0 * std::sqrt(3.0) / 8.0).epsilon(1e-9));
  CHECK(sup_gprime_on(at, 0.0, 0.0) == doctest::Approx(0.0));
  CHECK(min_g_on(at, 1.0 / 13.0, 1.0) == doctest::Approx(std::atan(1.0 / 169.0)).epsilon(1e-12));
  CHECK(min_g_on(rb, 1.0, 1.0) == doctest::Approx(0.5));
  CHECK(min_g_on(Nonlinearity::power(2.0), 0.5, 2.0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(sup_gprime_on(Nonlinearity::power(0.5), 0.0, 1.0), Error);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.2, 3.0);
  const double m = min_g_on(rb, 0.2, 3.0);
  const double D = sup_gprime_on(rb, 0.2, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double s = U(rng);
    CHECK(m <= eval_g(rb, s));
    CHECK(D >= std::abs(eval_gprime(rb, s)));
  }
}
