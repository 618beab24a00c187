#include <cmath>
#include <numbers>

#include "doctest.h"
#include "indef/errors.hpp"
#include "indef/thresholds.hpp"

using namespace indef;
using std::numbers::pi;

namespace {

const PeriodicWeight kRef = PeriodicWeight::sin_plus_k(-0.5);
const Nonlinearity kAtan = Nonlinearity::arctan_pow(2.0);
const Interval kI{pi / 6, 5 * pi / 6};

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::DomainError;
}

}  // namespace

TEST_CASE("lambda upper on the reference instance") {
  const LambdaUpper r = compute_lambda_upper(kRef, kAtan, 0.0, 1.0, kI, pi / 6);
  const double delta = (pi / 6) / (pi / 6 + 2 * pi);
  const double eta = std::atan(delta * delta);
  const double core = std::cos(pi / 3) - std::cos(2 * pi / 3) - 0.5 * (pi / 3);
  CHECK(r.delta == doctest::Approx(1.0 / 13).epsilon(1e-14));
  CHECK(r.eta == doctest::Approx(eta).epsilon(1e-12));
  CHECK(r.eta == doctest::Approx(5.917e-3).epsilon(1e-3));
  CHECK(r.core_integral == doctest::Approx(core).epsilon(1e-12));
  CHECK(r.core_integral == doctest::Approx(0.47640).epsilon(1e-4));
  CHECK(r.sigma0 == doctest::Approx(pi / 3));
  CHECK(r.tau0 == doctest::Approx(2 * pi / 3));
  const double expect = 2.0 / ((pi / 6) * eta * core);
  CHECK(r.lambda_star == doctest::Approx(expect).epsilon(1e-10));
  CHECK(r.lambda_star == doctest::Approx(1354.0).epsilon(1e-3));
}

TEST_CASE("lambda upper scales with rho as the formula says") {
  const LambdaUpper a = compute_lambda_upper(kRef, kAtan, 0.0, 2.0, kI, pi / 6);
  const double delta = 1.0 / 13;
  const double eta = std::atan(std::pow(2 * delta, 2));  // g increasing: min at delta rho
  const double core = 1.0 - pi / 6;
  CHECK(a.lambda_star == doctest::Approx(4.0 / ((pi / 6) * eta * core)).epsilon(1e-10));
}

TEST_CASE("lambda upper with damping") {
  const double c = 0.3, T = 2 * pi, eps = pi / 6;
  const LambdaUpper r = compute_lambda_upper(kRef, kAtan, c, 1.0, kI, eps);
  const double delta = eps / (eps + std::exp(2 * c * T) * T);
  CHECK(r.delta == doctest::Approx(delta).epsilon(1e-13));
  const double eta = std::atan(delta * delta);
  const double expect = 2.0 * (eps * c + std::exp(c * T)) / (eps * eta * (1.0 - pi / 6));
  CHECK(r.lambda_star == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("lambda upper errors") {
  CHECK(code_of([] { compute_lambda_upper(kRef, kAtan, 0.0, 1.0, {0.0, pi}, 0.1); }) ==
        ErrorCode::PreconditionViolated);
  CHECK(code_of([] { compute_lambda_upper(kRef, kAtan, 0.0, 1.0, kI, 1.1); }) ==
        ErrorCode::InvalidArgument);
  // Zero weight on I passes the sign check but has an empty core.
  const PeriodicWeight flat = PeriodicWeight::piecewise({0.0, 1.0}, {0.0, -1.0}, 3.0);
  CHECK(code_of([&] { compute_lambda_upper(flat, kAtan, 0.0, 1.0, {0.0, 1.0}, 0.1); }) ==
        ErrorCode::EmptyCore);
}

TEST_CASE("eps optimisation never does worse than the quarter default") {
  const double best = optimize_eps(kRef, kAtan, 0.0, 1.0, kI);
  CHECK(best > 0.0);
  CHECK(best < kI.length() / 2);
  const double at_best = compute_lambda_upper(kRef, kAtan, 0.0, 1.0, kI, best).lambda_star;
  for (int k = 1; k <= 20; ++k) {
    const double e = kI.length() / 2 * k / 21.0;
    CHECK(at_best <= compute_lambda_upper(kRef, kAtan, 0.0, 1.0, kI, e).lambda_star);
  }
}

TEST_CASE("alpha star") {
  const AlphaStar a = compute_alpha_star(kRef, 0.0, 1.0, kI, pi / 6);
  CHECK(a.K == doctest::Approx(12 / pi).epsilon(1e-14));
  CHECK(a.alpha_star == doctest::Approx(1.01 * (12 / pi) / (pi / 3)).epsilon(1e-14));
  CHECK(a.alpha_star == doctest::Approx(3.684).epsilon(1e-3));
  const AlphaStar z = compute_alpha_star(kRef, 0.0, 1e-9, kI, pi / 6);
  CHECK(z.K < 1e-8);
  const double c = 0.2;
  const AlphaStar d = compute_alpha_star(kRef, c, 1.0, kI, pi / 6);
  CHECK(d.K == doctest::Approx(2 * std::exp(c * 2 * pi) / (pi / 6) + 2 * c).epsilon(1e-14));
}

TEST_CASE("omega star") {
  const OmegaStar w = compute_omega_star(kRef, 0.0);
  const double l1 = 2 * std::sqrt(3.0) + pi / 3;
  CHECK(w.l1_norm == doctest::Approx(l1).epsilon(1e-10));
  CHECK(w.l1_norm == doctest::Approx(4.5113).epsilon(1e-4));
  CHECK(w.neg_integral == doctest::Approx(pi).epsilon(1e-12));
  CHECK(w.M == doctest::Approx(l1 + pi).epsilon(1e-6));
  CHECK(w.M == doctest::Approx(7.652).epsilon(1e-3));
  CHECK(w.omega_star == doctest::Approx(1 / (2 * (l1 + pi) * (l1 + pi))).epsilon(1e-9));

  const OmegaStar u = compute_omega_star(PeriodicWeight::constant(-1.0, 1.0), 0.0);
  CHECK(u.M == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(u.omega_star == doctest::Approx(0.25).epsilon(1e-9));

  CHECK(code_of([] { compute_omega_star(PeriodicWeight::sin_plus_k(0.0), 0.0); }) ==
        ErrorCode::AverageNotNegative);
}

TEST_CASE("lambda lower") {
  const double l1 = 2 * std::sqrt(3.0) + pi / 3;
  const double omega = 1 / (2 * (l1 + pi) * (l1 + pi));
  const double D = 1.5 * std::pow(3.0, -0.25);
  CHECK(compute_lambda_lower(kRef, kAtan, 0.0) == doctest::Approx(omega / D).epsilon(1e-8));
  CHECK(compute_lambda_lower(kRef, kAtan, 0.0) == doctest::Approx(7.48e-3).epsilon(2e-3));
  CHECK(compute_lambda_lower(kRef, Nonlinearity::power(1.0), 0.0) ==
        doctest::Approx(omega).epsilon(1e-8));
  CHECK(code_of([] { compute_lambda_lower(kRef, Nonlinearity::power(2.0), 0.0); }) ==
        ErrorCode::UnboundedDerivative);
}

TEST_CASE("mu threshold") {
  CHECK(corollary_mu_threshold(PeriodicWeight::sin_plus_k(0.0), 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  const PeriodicWeight pw = PeriodicWeight::piecewise({0.0, 1.0}, {2.0, -1.0}, 3.0);
  CHECK(corollary_mu_threshold(pw, 3.0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(code_of([] { corollary_mu_threshold(PeriodicWeight::constant(1.0), 1.0); }) ==
        ErrorCode::NoNegativePart);
}

TEST_CASE("threshold report") {
  ThresholdInputs in;
  in.mu_lambda = 2.0;
  const ThresholdReport r = compute_thresholds(kRef, kAtan, 0.0, in);
  CHECK(r.I.lo == doctest::Approx(pi / 6).epsilon(1e-10));
  CHECK(r.I.hi == doctest::Approx(5 * pi / 6).epsilon(1e-10));
  CHECK(r.eps == doctest::Approx(pi / 6).epsilon(1e-10));
  CHECK(r.lambda_star_upper == doctest::Approx(1355.0342652).epsilon(1e-8));
  CHECK(r.lambda_star_lower < r.lambda_star_upper);
  CHECK(r.window_consistent);
  REQUIRE(r.mu_threshold.has_value());
  CHECK(*r.mu_threshold > 0.0);

  ThresholdInputs opt;
  opt.optimize_eps = true;
  CHECK(compute_thresholds(kRef, kAtan, 0.0, opt).lambda_star_upper <= r.lambda_star_upper);

  CHECK(code_of([] { compute_thresholds(PeriodicWeight::sin_plus_k(0.0), kAtan, 0.0); }) ==
        ErrorCode::AverageNotNegative);
  CHECK(code_of([] { compute_thresholds(PeriodicWeight::constant(-1.0), kAtan, 0.0); }) ==
        ErrorCode::NoPositivityInterval);
}
