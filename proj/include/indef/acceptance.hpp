#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "indef/io.hpp"

namespace indef {

/// Every threshold the suite compares against. Defaults are the pinned values.
struct AcceptanceTolerances {
  double threshold_rel = 1e-6;        // library thresholds vs closed-form oracle
  double runtime_seconds = 600.0;     // reference sweep wall time
  double degree_margin = 0.0;         // boundary certification margin must exceed this
  double radial_identity_rel = 1e-8;  // integral of a vs integral of r^{N-1} Q
  double radial_residual = 1e-5;      // lifted radial ODE residual
  double radial_neumann = 1e-6;       // |U'(R1)|, |U'(R2)|
  double abel_rel = 1e-7;             // |det DP - e^{-cT}| / e^{|c|T}
  double fd_agreement = 1e-5;         // variational vs finite-difference Jacobian
};

struct AcceptanceConfig {
  std::vector<int> criteria{1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::uint64_t seed = 0x5EED;
  int jobs = 1;
  AcceptanceTolerances tol;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Reads {"instances": [...], "tolerances": {...}} (both optional; an empty
/// instance list or an unknown id is a SchemaError).
AcceptanceConfig acceptance_config_from_json(const Json& j, AcceptanceConfig base = {});

/// Runs the requested criteria in increasing order; progress lines go to `log`.
std::vector<CriterionResult> run_acceptance(const AcceptanceConfig& cfg, std::ostream* log = nullptr);

Json acceptance_to_json(const std::vector<CriterionResult>& results);

/// Closed-form values for the reference instance (c = 0, a = sin t - 1/2,
/// g = arctan s^2, rho = 1, eps = pi/6), independent of the thresholds module.
struct ReferenceOracle {
  double lambda_upper = 0.0;
  double lambda_lower = 0.0;
  double alpha_star = 0.0;
  double omega_star = 0.0;
  double D = 0.0;
  double l1_norm = 0.0;
};
ReferenceOracle reference_oracle();

}  // namespace indef
