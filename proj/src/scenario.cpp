#include "capinf/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace capinf {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

/// Strips a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& s) {
  bool in_string = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_string = !in_string;
    if (s[i] == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

ConfigValue parse_scalar(const std::string& token, int line) {
  if (token == "true") return {true};
  if (token == "false") return {false};
  if (token.size() >= 2 && token.front() == '"' && token.back() == '"')
    return {token.substr(1, token.size() - 2)};
  try {
    size_t used = 0;
    double v = std::stod(token, &used);
    if (used == token.size()) return {v};
  } catch (const std::exception&) {
  }
  throw ParameterError("config line " + std::to_string(line) + ": bad value '" + token + "'");
}

ConfigValue parse_value(const std::string& raw, int line) {
  const std::string text = trim(raw);
  if (text.empty()) throw ParameterError("config line " + std::to_string(line) + ": empty value");
  if (text.front() == '[') {
    if (text.back() != ']')
      throw ParameterError("config line " + std::to_string(line) + ": unterminated array");
    std::vector<double> nums;
    std::vector<std::string> strs;
    bool has_string = false;
    std::string body = text.substr(1, text.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      ConfigValue v = parse_scalar(item, line);
      if (std::holds_alternative<std::string>(v.data)) {
        has_string = true;
        strs.push_back(std::get<std::string>(v.data));
      } else if (std::holds_alternative<double>(v.data)) {
        nums.push_back(std::get<double>(v.data));
      } else {
        throw ParameterError("config line " + std::to_string(line) + ": bad array element");
      }
    }
    if (has_string && !nums.empty())
      throw ParameterError("config line " + std::to_string(line) + ": mixed array types");
    if (has_string) return {strs};
    return {nums};
  }
  return parse_scalar(text, line);
}

[[noreturn]] void bad_key(const std::string& key, const std::string& expected) {
  throw ParameterError("scenario key '" + key + "': expected " + expected);
}

}  // namespace

bool ConfigValue::as_bool() const {
  if (auto* v = std::get_if<bool>(&data)) return *v;
  throw ParameterError("expected a boolean");
}
double ConfigValue::as_number() const {
  if (auto* v = std::get_if<double>(&data)) return *v;
  throw ParameterError("expected a number");
}
long long ConfigValue::as_integer() const {
  const double v = as_number();
  if (v != std::floor(v)) throw ParameterError("expected an integer");
  return static_cast<long long>(v);
}
const std::string& ConfigValue::as_string() const {
  if (auto* v = std::get_if<std::string>(&data)) return *v;
  throw ParameterError("expected a string");
}
const std::vector<double>& ConfigValue::as_numbers() const {
  if (auto* v = std::get_if<std::vector<double>>(&data)) return *v;
  throw ParameterError("expected an array of numbers");
}
const std::vector<std::string>& ConfigValue::as_strings() const {
  if (auto* v = std::get_if<std::vector<std::string>>(&data)) return *v;
  throw ParameterError("expected an array of strings");
}

ConfigMap parse_config(const std::string& text) {
  ConfigMap map;
  std::stringstream ss(text);
  std::string line;
  std::string table;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParameterError("config line " + std::to_string(line_no) + ": bad table header");
      table = trim(line.substr(1, line.size() - 2));
      if (table.empty())
        throw ParameterError("config line " + std::to_string(line_no) + ": empty table name");
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParameterError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw ParameterError("config line " + std::to_string(line_no) + ": empty key");
    const std::string full = table.empty() ? key : table + "." + key;
    if (map.count(full))
      throw ParameterError("config line " + std::to_string(line_no) + ": duplicate key '" +
                           full + "'");
    map[full] = parse_value(line.substr(eq + 1), line_no);
  }
  return map;
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open scenario file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

SetSpec ScenarioConfig::obstacle(std::optional<double> delta_override) const {
  std::vector<double> params = obstacle_params;
  if (delta_override) {
    if (obstacle_kind != "axis_ray")
      throw ParameterError("delta sweep only applies to axis_ray obstacles");
    params = {obstacle_params.empty() ? 1.0 : obstacle_params[0], *delta_override};
  }
  std::ostringstream shape;
  shape << obstacle_kind;
  if (!params.empty()) {
    shape << ":";
    for (size_t i = 0; i < params.size(); ++i) shape << (i ? "," : "") << params[i];
  }
  return parse_shape(shape.str(), dimension);
}

ScenarioConfig scenario_from_config(const ConfigMap& map, const std::string& name) {
  ScenarioConfig cfg;
  cfg.name = name;
  std::vector<std::string> unknown;
  auto get = [&](const std::string& key) -> const ConfigValue* {
    auto it = map.find(key);
    return it == map.end() ? nullptr : &it->second;
  };

  static const std::vector<std::string> known = {
      "name", "dimension", "seed", "output_dir",
      "obstacle.kind", "obstacle.params", "obstacle.delta_sweep",
      "shells.n_min", "shells.n_max", "shells.paths",
      "field.kind", "field.lambda", "field.cell",
      "wiener.lambda_form", "wiener.lambda", "wiener.integral_form",
      "wiener.a_verdict", "wiener.a_n_min", "wiener.a_n_max", "wiener.a_grid_h",
      "wiener.a_lambda", "wiener.a_cell",
      "classifier.theta", "classifier.power_tol", "classifier.eps0_floor",
      "classifier.fit_accept", "classifier.min_terms",
      "measure.routes", "measure.point", "measure.pde_radii", "measure.pde_h",
      "measure.wos_paths", "measure.wos_escape_radius", "measure.eps_shell",
      "recurrence.enabled", "recurrence.thresholds", "recurrence.paths",
      "agreement.tau0", "agreement.tau1", "agreement.trend_tol",
  };
  for (const auto& [key, value] : map) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ParameterError("scenario: unknown key '" + key + "'");
  }

  if (auto* v = get("name")) cfg.name = v->as_string();
  if (auto* v = get("dimension")) cfg.dimension = static_cast<int>(v->as_integer());
  if (cfg.dimension < 3) bad_key("dimension", "an integer >= 3");
  if (auto* v = get("seed")) cfg.seed = static_cast<std::uint64_t>(v->as_integer());
  if (auto* v = get("output_dir")) cfg.output_dir = v->as_string();

  if (auto* v = get("obstacle.kind")) cfg.obstacle_kind = v->as_string();
  if (auto* v = get("obstacle.params")) cfg.obstacle_params = v->as_numbers();
  if (auto* v = get("obstacle.delta_sweep")) {
    cfg.delta_sweep = v->as_numbers();
    for (double d : cfg.delta_sweep)
      if (d <= 0) bad_key("obstacle.delta_sweep", "positive thicknesses");
    if (!std::is_sorted(cfg.delta_sweep.rbegin(), cfg.delta_sweep.rend()))
      bad_key("obstacle.delta_sweep", "decreasing thicknesses (finest last)");
  }

  if (auto* v = get("shells.n_min")) cfg.shell_min = static_cast<int>(v->as_integer());
  if (auto* v = get("shells.n_max")) cfg.shell_max = static_cast<int>(v->as_integer());
  if (cfg.shell_min < 1 || cfg.shell_max < cfg.shell_min)
    bad_key("shells.n_min/n_max", "1 <= n_min <= n_max");
  if (auto* v = get("shells.paths")) cfg.shell_paths = v->as_integer();
  if (cfg.shell_paths < 1) bad_key("shells.paths", "a positive budget");

  if (auto* v = get("field.kind")) {
    const std::string& kind = v->as_string();
    if (kind == "identity") cfg.field_kind = FieldKind::Identity;
    else if (kind == "checkerboard") cfg.field_kind = FieldKind::Checkerboard;
    else if (kind == "cellwise_random") cfg.field_kind = FieldKind::CellwiseRandom;
    else bad_key("field.kind", "identity | checkerboard | cellwise_random");
  }
  if (auto* v = get("field.lambda")) cfg.field_lambda = v->as_number();
  if (cfg.field_lambda < 1.0) bad_key("field.lambda", "a value >= 1");
  if (auto* v = get("field.cell")) cfg.field_cell = v->as_number();
  if (cfg.field_cell <= 0.0) bad_key("field.cell", "a positive cell size");

  if (auto* v = get("wiener.lambda_form")) cfg.form_lambda = v->as_bool();
  if (auto* v = get("wiener.lambda")) cfg.lambda_level = v->as_number();
  if (cfg.lambda_level <= 1.0) bad_key("wiener.lambda", "a value > 1");
  if (auto* v = get("wiener.integral_form")) cfg.form_integral = v->as_bool();
  if (auto* v = get("wiener.a_verdict")) cfg.a_verdict = v->as_bool();
  if (auto* v = get("wiener.a_n_min")) cfg.a_shell_min = static_cast<int>(v->as_integer());
  if (auto* v = get("wiener.a_n_max")) cfg.a_shell_max = static_cast<int>(v->as_integer());
  if (auto* v = get("wiener.a_grid_h")) cfg.a_grid_h = v->as_number();
  if (auto* v = get("wiener.a_lambda")) cfg.a_lambda = v->as_number();
  if (cfg.a_lambda < 1.0) bad_key("wiener.a_lambda", "a value >= 1");
  if (auto* v = get("wiener.a_cell")) cfg.a_cell = v->as_number();
  if (cfg.a_cell <= 0.0) bad_key("wiener.a_cell", "a positive cell size");

  if (auto* v = get("classifier.theta")) cfg.classifier.theta = v->as_number();
  if (auto* v = get("classifier.power_tol")) cfg.classifier.power_tol = v->as_number();
  if (auto* v = get("classifier.eps0_floor")) cfg.classifier.eps0_floor = v->as_number();
  if (auto* v = get("classifier.fit_accept")) cfg.classifier.fit_accept = v->as_number();
  if (auto* v = get("classifier.min_terms"))
    cfg.classifier.min_terms = static_cast<int>(v->as_integer());

  if (auto* v = get("measure.routes")) cfg.measure_routes = v->as_strings();
  for (const auto& r : cfg.measure_routes)
    if (r != "wos" && r != "pde") bad_key("measure.routes", "entries 'wos' or 'pde'");
  if (auto* v = get("measure.point")) cfg.measure_point = v->as_numbers();
  if (!cfg.measure_routes.empty() &&
      static_cast<int>(cfg.measure_point.size()) != cfg.dimension)
    bad_key("measure.point", "a point with 'dimension' coordinates");
  if (auto* v = get("measure.pde_radii")) cfg.pde_radii = v->as_numbers();
  if (auto* v = get("measure.pde_h")) cfg.pde_h = v->as_number();
  if (cfg.pde_h <= 0) bad_key("measure.pde_h", "a positive spacing");
  if (auto* v = get("measure.wos_paths")) cfg.wos_paths = v->as_integer();
  if (cfg.wos_paths < 1) bad_key("measure.wos_paths", "a positive budget");
  if (auto* v = get("measure.wos_escape_radius")) cfg.wos_escape_radius = v->as_number();
  if (auto* v = get("measure.eps_shell")) cfg.eps_shell = v->as_number();
  if (cfg.eps_shell <= 0) bad_key("measure.eps_shell", "a positive tolerance");

  if (auto* v = get("recurrence.enabled")) cfg.recurrence = v->as_bool();
  if (auto* v = get("recurrence.thresholds")) {
    for (double m : v->as_numbers())
      cfg.recurrence_thresholds.push_back(static_cast<int>(m));
  }
  if (cfg.recurrence && cfg.recurrence_thresholds.empty())
    bad_key("recurrence.thresholds", "a nonempty list when recurrence is enabled");
  if (auto* v = get("recurrence.paths")) cfg.recurrence_paths = v->as_integer();
  if (cfg.recurrence_paths < 1) bad_key("recurrence.paths", "a positive budget");

  if (auto* v = get("agreement.tau0")) cfg.tau0 = v->as_number();
  if (auto* v = get("agreement.tau1")) cfg.tau1 = v->as_number();
  if (!(cfg.tau0 > 0 && cfg.tau0 < cfg.tau1 && cfg.tau1 <= 1.0))
    bad_key("agreement.tau0/tau1", "0 < tau0 < tau1 <= 1");
  if (auto* v = get("agreement.trend_tol")) cfg.trend_tol = v->as_number();

  cfg.obstacle();  // validates the obstacle spec early
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  ConfigMap map = parse_config_file(path);
  std::string name = path;
  const size_t slash = name.find_last_of('/');
  if (slash != std::string::npos) name = name.substr(slash + 1);
  const size_t dot = name.find_last_of('.');
  if (dot != std::string::npos) name = name.substr(0, dot);
  return scenario_from_config(map, name);
}

}  // namespace capinf
