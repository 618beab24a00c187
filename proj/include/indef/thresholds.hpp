#pragma once

#include <optional>

#include "indef/nonlinearity.hpp"
#include "indef/weight.hpp"

namespace indef {

struct LambdaUpper {
  double lambda_star = 0.0;
  double delta = 0.0;
  double eta = 0.0;
  double sigma0 = 0.0;
  double tau0 = 0.0;
  double core_integral = 0.0;  // integral of a over [sigma0, tau0]
};

/// Existence threshold for a fixed rho, positivity interval I and inner
/// margin eps. Throws PreconditionViolated (a < 0 somewhere on I),
/// InvalidArgument (2 eps >= |I|) or EmptyCore (core integral <= 0).
LambdaUpper compute_lambda_upper(const PeriodicWeight& w, const Nonlinearity& nl, double c,
                                 double rho, const Interval& I, double eps);

/// eps among |I|/2 * k/21, k = 1..20, minimising lambda*; cores with
/// nonpositive integral are skipped.
double optimize_eps(const PeriodicWeight& w, const Nonlinearity& nl, double c, double rho,
                    const Interval& I);

struct AlphaStar {
  double K = 0.0;
  double alpha_star = 0.0;
};

/// K = 2 rho e^{|c|T} / eps + 2 |c| rho and alpha* = 1.01 K / (tau0 - sigma0).
AlphaStar compute_alpha_star(const PeriodicWeight& w, double c, double rho, const Interval& I,
                             double eps);

struct OmegaStar {
  double M = 0.0;
  double omega_star = 0.0;
  double l1_norm = 0.0;
  double neg_integral = 0.0;  // -(integral of a over a period)
};

/// Maximises min{(M - E|a|_1)/(M^2 T E), (-int a)/(M^2 T)}, E = e^{|c|T},
/// over M with Brent minimisation. Throws AverageNotNegative if int a >= 0.
OmegaStar compute_omega_star(const PeriodicWeight& w, double c);

/// omega* / sup g'. Propagates UnboundedDerivative.
double compute_lambda_lower(const PeriodicWeight& w, const Nonlinearity& nl, double c);

/// lambda * int a+ / int a-. Throws NoNegativePart when int a- = 0.
double corollary_mu_threshold(const PeriodicWeight& w, double lambda);

struct ThresholdInputs {
  double rho = 1.0;
  std::optional<Interval> I;       // default: largest positivity interval
  std::optional<double> eps;       // default |I| / 4
  bool optimize_eps = false;
  std::optional<double> mu_lambda; // lambda for the mu threshold, if wanted
};

struct ThresholdReport {
  double c = 0.0;
  double period = 0.0;
  double rho = 0.0;
  Interval I;
  double eps = 0.0;
  double sigma0 = 0.0;
  double tau0 = 0.0;
  double delta = 0.0;
  double eta = 0.0;
  double core_integral = 0.0;
  double lambda_star_upper = 0.0;
  double K = 0.0;
  double alpha_star = 0.0;
  double l1_norm = 0.0;
  double neg_integral = 0.0;
  double M = 0.0;
  double omega_star = 0.0;
  double D = 0.0;
  double lambda_star_lower = 0.0;
  std::optional<double> mu_threshold;
  /// lambda_* <= lambda*; false is reported, never thrown.
  bool window_consistent = false;
};

ThresholdReport compute_thresholds(const PeriodicWeight& w, const Nonlinearity& nl, double c,
                                   const ThresholdInputs& in = {});

}  // namespace indef
