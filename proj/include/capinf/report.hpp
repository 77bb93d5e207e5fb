#pragma once

#include "capinf/scenario.hpp"
#include "capinf/wiener.hpp"
#include "capinf/wos.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace capinf {

using Json = nlohmann::json;

struct MeasureRecord {
  std::string route;  // "pde" | "wos"
  std::vector<double> params;  // truncation radii (pde) or escape radii (wos)
  std::vector<double> values;  // raw estimates per parameter
  double final_value = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::string trend;          // "decreasing" | "flat"
  std::string measure_class;  // "regular" | "irregular" | "unclassified"
};

struct FormVerdict {
  std::string form;  // "dyadic" | "lambda" | "integral" | "a_capacity"
  std::vector<SeriesTerm> terms;
  std::vector<Interval> partial_sums;
  Verdict verdict = Verdict::Inconclusive;
  TailDiagnostics diagnostics;
};

struct RunReport {
  std::string scenario_name;
  int dimension = 3;
  std::uint64_t seed = 0;

  std::vector<CapacityEstimate> shell_gammas;  // dyadic shells at the finest delta
  /// delta -> per-shell capacity values, for thin-set sweeps
  std::map<double, std::vector<double>> delta_sweep;

  std::vector<FormVerdict> forms;  // dyadic first when present
  std::optional<bool> forms_agree;

  std::vector<MeasureRecord> measures;
  std::optional<RecurrenceResult> recurrence;

  std::string verdict = "Inconclusive";       // dyadic-form verdict
  std::string measure_class = "unclassified"; // combined over routes
  std::string agreement = "unclassified";     // "match" | "mismatch" | "unclassified"

  std::map<std::string, std::string> stage_errors;
  std::map<std::string, double> timings_seconds;
  Json provenance;  // budgets, tolerances, normalization note
};

Json to_json(const RunReport& report);

/// Writes report.json, shells.csv (n, gamma, CIs, term, partial sum, method)
/// and measures.csv (route, point, parameter, value, CI) into dir. File
/// contents are deterministic for a given report, timings aside.
void emit_report(const RunReport& report, const std::string& dir);

/// Minimal JSON-schema check (type / required / properties / items / enum),
/// enough to pin the report layout. Returns the list of violations.
std::vector<std::string> validate_against_schema(const Json& document, const Json& schema);

/// The schema shipped with the repository.
Json report_schema();

/// 0 = match, 2 = mismatch, 3 = unclassified or no verdict.
int crosscheck_exit_code(const RunReport& report);

}  // namespace capinf
