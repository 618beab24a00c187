#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "indef/degree.hpp"
#include "indef/radial.hpp"
#include "indef/shooting.hpp"
#include "indef/sweep.hpp"
#include "indef/thresholds.hpp"

namespace indef {

using Json = nlohmann::json;

/// Serialises with every floating-point value printed as %.17g and object
/// keys in sorted order, so equal inputs give byte-identical text.
/// Non-finite numbers become null.
std::string dump_json(const Json& j, int indent = 2);
std::string format_double(double x);

// Schema readers. All throw SchemaError naming the offending path on a
// missing field, wrong type or unknown key.
PeriodicWeight weight_from_json(const Json& j);
Nonlinearity nonlinearity_from_json(const Json& j);
ProblemSpec problem_from_json(const Json& j);
RadialWeight radial_weight_from_json(const Json& j);
Annulus annulus_from_json(const Json& j);
Interval interval_from_json(const Json& j, const std::string& path);
ThresholdInputs threshold_inputs_from_json(const Json& j);

Json weight_to_json(const PeriodicWeight& w);
Json nonlinearity_to_json(const Nonlinearity& nl);
Json problem_to_json(const ProblemSpec& p);

Json solution_to_json(const Solution& s);
Json thresholds_to_json(const ThresholdReport& r);
Json sweep_to_json(const SweepResult& r);
Json ledger_to_json(const LedgerReport& r);

/// lambda,count,norm_1..norm_m,index_1..index_m with m the largest count.
std::string sweep_to_csv(const SweepResult& r);
/// lambda,branch,sup_norm,index; one line per positive solution.
std::string bifurcation_csv(const SweepResult& r);
/// t,u,v on n uniform samples over one period.
std::string trajectory_csv(const Solution& s, int n = 1001);
/// r,U.
std::string profile_csv(const RadialProfile& p);

/// Reads and parses a JSON file; SchemaError on I/O or syntax problems.
Json read_json_file(const std::string& path);

}  // namespace indef
