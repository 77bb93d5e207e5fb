#pragma once

#include "capinf/report.hpp"
#include "capinf/scenario.hpp"

#include <string>

namespace capinf {

/// Full pipeline: shells -> capacities -> Wiener verdict (all configured
/// forms) -> harmonic-measure estimates -> agreement record. Stage failures
/// are captured per stage; a partial report is still produced.
RunReport run_scenario(const ScenarioConfig& config);

/// Output directory resolution: explicit argument, then the scenario's
/// output_dir, then $CAPINF_OUTPUT_DIR/<name>, then out/<name>.
std::string resolve_output_dir(const ScenarioConfig& config, const std::string& override_dir);

/// Measure-based classification of one route: "regular" when the final
/// estimate is <= tau0 with a decreasing trend, "irregular" when >= tau1 with
/// a flat trend, otherwise "unclassified".
std::pair<std::string, std::string> classify_measure(const std::vector<double>& values,
                                                     double final_value, double tau0,
                                                     double tau1, double trend_tol);

}  // namespace capinf
