#include "indef/thresholds.hpp"

#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>

#include "indef/errors.hpp"

namespace indef {

namespace {

void check_nonnegative_on(const PeriodicWeight& w, const Interval& I) {
  constexpr int kProbe = 2000;
  for (int i = 0; i <= kProbe; ++i) {
    // Stay strictly inside so a jump at the right end is not sampled.
    double t = I.lo + I.length() * i / kProbe;
    if (i == kProbe) t = std::nextafter(I.hi, I.lo);
    if (w.eval(t) < -1e-12) {
      throw Error(ErrorCode::PreconditionViolated, "weight is negative on I");
    }
  }
}

}  // namespace

LambdaUpper compute_lambda_upper(const PeriodicWeight& w, const Nonlinearity& nl, double c,
                                 double rho, const Interval& I, double eps) {
  if (!(rho > 0.0) || !(eps > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "rho and eps must be positive");
  }
  if (!(2.0 * eps < I.length())) {
    throw Error(ErrorCode::InvalidArgument, "2 eps must be smaller than |I|");
  }
  check_nonnegative_on(w, I);
  const double T = w.period();
  LambdaUpper r;
  r.sigma0 = I.lo + eps;
  r.tau0 = I.hi - eps;
  r.core_integral = w.integral(r.sigma0, r.tau0);
  if (!(r.core_integral > 0.0)) {
    throw Error(ErrorCode::EmptyCore, "integral of a over [sigma0, tau0] is not positive");
  }
  const double ac = std::abs(c);
  r.delta = eps / (eps + std::exp(2.0 * ac * T) * T);
  r.eta = min_g_on(nl, r.delta * rho, rho);
  r.lambda_star = 2.0 * rho * (eps * ac + std::exp(ac * T)) / (eps * r.eta * r.core_integral);
  return r;
}

double optimize_eps(const PeriodicWeight& w, const Nonlinearity& nl, double c, double rho,
                    const Interval& I) {
  double best_eps = std::numeric_limits<double>::quiet_NaN();
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 20; ++k) {
    const double eps = 0.5 * I.length() * k / 21.0;
    try {
      const double l = compute_lambda_upper(w, nl, c, rho, I, eps).lambda_star;
      if (l < best) {
        best = l;
        best_eps = eps;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyCore) throw;
    }
  }
  if (!std::isfinite(best)) throw Error(ErrorCode::EmptyCore, "no eps gives a positive core integral");
  return best_eps;
}

AlphaStar compute_alpha_star(const PeriodicWeight& w, double c, double rho, const Interval& I,
                             double eps) {
  if (!(rho > 0.0) || !(eps > 0.0) || !(2.0 * eps < I.length())) {
    throw Error(ErrorCode::InvalidArgument, "need rho > 0 and 0 < 2 eps < |I|");
  }
  const double ac = std::abs(c);
  const double E = std::exp(ac * w.period());
  AlphaStar r;
  r.K = 2.0 * rho * E / eps + 2.0 * ac * rho;
  r.alpha_star = 1.01 * r.K / (I.length() - 2.0 * eps);
  return r;
}

OmegaStar compute_omega_star(const PeriodicWeight& w, double c) {
  const double T = w.period();
  const double total = w.integral(0.0, T);
  if (!(total < 0.0)) {
    throw Error(ErrorCode::AverageNotNegative, "(a_*) fails: integral of a is not negative");
  }
  OmegaStar r;
  r.l1_norm = w.l1_norm();
  r.neg_integral = -total;
  const double E = std::exp(std::abs(c) * T);
  const auto omega = [&](double M) {
    const double first = (M - E * r.l1_norm) / (M * M * T * E);
    const double second = r.neg_integral / (M * M * T);
    return std::min(first, second);
  };
  const double lo = E * r.l1_norm * (1.0 + 1e-6);
  const double hi = 100.0 * E * r.l1_norm;
  // Boost's Brent minimiser falls back to golden-section steps on the kink.
  const auto [M, neg] = boost::math::tools::brent_find_minima(
      [&](double M) { return -omega(M); }, lo, hi, std::numeric_limits<double>::digits / 2);
  r.M = M;
  r.omega_star = -neg;
  return r;
}

double compute_lambda_lower(const PeriodicWeight& w, const Nonlinearity& nl, double c) {
  const OmegaStar o = compute_omega_star(w, c);
  const double D = sup_gprime_on(nl, 0.0);
  return o.omega_star / D;
}

double corollary_mu_threshold(const PeriodicWeight& w, double lambda) {
  const auto [plus, minus] = sign_decompose(w);
  const double T = w.period();
  const double neg = minus.integral(0.0, T);
  if (!(neg > 0.0)) throw Error(ErrorCode::NoNegativePart, "a has no negative part");
  return lambda * plus.integral(0.0, T) / neg;
}

ThresholdReport compute_thresholds(const PeriodicWeight& w, const Nonlinearity& nl, double c,
                                   const ThresholdInputs& in) {
  ThresholdReport r;
  r.c = c;
  r.period = w.period();
  r.rho = in.rho;
  r.I = in.I ? *in.I : find_positivity_interval(w, 1e-12);
  if (in.eps) {
    r.eps = *in.eps;
  } else if (in.optimize_eps) {
    r.eps = optimize_eps(w, nl, c, in.rho, r.I);
  } else {
    r.eps = r.I.length() / 4.0;
  }
  const LambdaUpper up = compute_lambda_upper(w, nl, c, in.rho, r.I, r.eps);
  r.sigma0 = up.sigma0;
  r.tau0 = up.tau0;
  r.delta = up.delta;
  r.eta = up.eta;
  r.core_integral = up.core_integral;
  r.lambda_star_upper = up.lambda_star;
  const AlphaStar a = compute_alpha_star(w, c, in.rho, r.I, r.eps);
  r.K = a.K;
  r.alpha_star = a.alpha_star;
  const OmegaStar o = compute_omega_star(w, c);
  r.l1_norm = o.l1_norm;
  r.neg_integral = o.neg_integral;
  r.M = o.M;
  r.omega_star = o.omega_star;
  r.D = sup_gprime_on(nl, 0.0);
  r.lambda_star_lower = r.omega_star / r.D;
  if (in.mu_lambda) r.mu_threshold = corollary_mu_threshold(w, *in.mu_lambda);
  r.window_consistent = r.lambda_star_lower <= r.lambda_star_upper;
  return r;
}

}  // namespace indef
