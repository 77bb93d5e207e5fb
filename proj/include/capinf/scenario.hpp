#pragma once

#include "capinf/capacity.hpp"
#include "capinf/common.hpp"
#include "capinf/field.hpp"
#include "capinf/wiener.hpp"

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace capinf {

/// Value of the TOML-subset scenario format: booleans, numbers, strings and
/// homogeneous arrays of numbers or strings.
struct ConfigValue {
  std::variant<bool, double, std::string, std::vector<double>, std::vector<std::string>> data;

  bool as_bool() const;
  double as_number() const;
  long long as_integer() const;
  const std::string& as_string() const;
  const std::vector<double>& as_numbers() const;
  const std::vector<std::string>& as_strings() const;
};

/// Flat "table.key" -> value map parsed from a TOML-style file: comments (#),
/// [table] headers, key = value lines.
using ConfigMap = std::map<std::string, ConfigValue>;

ConfigMap parse_config(const std::string& text);
ConfigMap parse_config_file(const std::string& path);

struct ScenarioConfig {
  std::string name = "scenario";
  int dimension = 3;
  std::uint64_t seed = 1;
  std::string output_dir;

  std::string obstacle_kind = "empty";
  std::vector<double> obstacle_params;
  std::vector<double> delta_sweep;  // optional thin-set thickness sweep, finest last

  int shell_min = 2;
  int shell_max = 12;
  long long shell_paths = 50000;

  FieldKind field_kind = FieldKind::Identity;
  double field_lambda = 1.0;
  double field_cell = 1.0;

  bool form_lambda = true;
  double lambda_level = 4.0;
  bool form_integral = true;

  bool a_verdict = false;  // variational shell capacities under a checkerboard field
  int a_shell_min = 2;
  int a_shell_max = 7;
  double a_grid_h = 1.0 / 24;
  double a_lambda = 4.0;
  // non-dyadic cell size: rescaled shells sample the field on dyadic lattices,
  // and a cell that divides the spacing would collapse the pattern
  double a_cell = 0.93;

  std::vector<std::string> measure_routes;  // subset of {"wos", "pde"}
  std::vector<double> measure_point;
  std::vector<double> pde_radii;
  double pde_h = 0.5;
  long long wos_paths = 100000;
  double wos_escape_radius = 64.0;
  double eps_shell = 1e-3;

  bool recurrence = false;
  std::vector<int> recurrence_thresholds;
  long long recurrence_paths = 20000;

  double tau0 = 0.1;   // measure class "regular" below this
  double tau1 = 0.5;   // measure class "irregular" above this
  double trend_tol = 0.1;

  ClassifierConfig classifier;

  /// The obstacle with an optional thickness override for thin shapes.
  SetSpec obstacle(std::optional<double> delta_override = {}) const;
};

/// Parses and schema-validates a scenario file; error messages carry the
/// offending key.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig scenario_from_config(const ConfigMap& map, const std::string& name);

}  // namespace capinf
