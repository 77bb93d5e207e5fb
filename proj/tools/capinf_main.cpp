// Command-line front end: scenario runs, one-off capacity estimates, verdict
// classification of a shells.csv table, harmonic-measure estimation, and the
// verdict-vs-measure cross-check with a CI-friendly exit code contract
// (0 match, 2 mismatch, 3 unclassified, 1 usage error).

#include "capinf/harness.hpp"
#include "capinf/rng.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace capinf;

void print_measures(const RunReport& report) {
  for (const auto& m : report.measures) {
    std::cout << "measure[" << m.route << "] = " << m.final_value << " (ci "
              << m.ci_low << ".." << m.ci_high << ", trend " << m.trend << ", class "
              << m.measure_class << ")\n";
    for (size_t i = 0; i < m.params.size(); ++i)
      std::cout << "  param " << m.params[i] << " -> " << m.values[i] << "\n";
  }
}

int run_command(const std::string& scenario_path, const std::string& out_dir, bool dump_grids) {
  ScenarioConfig cfg = load_scenario(scenario_path);
  RunReport report = run_scenario(cfg);
  const std::string dir = resolve_output_dir(cfg, out_dir);
  emit_report(report, dir);
  if (dump_grids && !cfg.pde_radii.empty() && !cfg.measure_point.empty()) {
    // re-solve the finest truncated problem and dump the grid function
    SetSpec set = cfg.delta_sweep.empty() ? cfg.obstacle() : cfg.obstacle(cfg.delta_sweep.back());
    CoefficientField field =
        make_field(cfg.field_kind, cfg.dimension, cfg.field_lambda, cfg.field_cell, cfg.seed);
    GridPtr grid = make_uniform_sphere_grid(cfg.dimension, cfg.pde_radii.back(), cfg.pde_h, &set);
    GridFunction u = grid->obstacle_cells == 0
                         ? GridFunction{grid, Eigen::VectorXd::Ones(grid->total_cells)}
                         : solve_dirichlet(grid, field, constant_bc(0.0, 1.0));
    write_grid_binary(u, dir + "/measure_grid.bin");
    write_slice_csv(u, cfg.dimension - 1, grid->cells_per_axis[cfg.dimension - 1] / 2,
                    dir + "/measure_slice.csv");
    std::cout << "grid dump written to " << dir << "/measure_grid.bin\n";
  }
  std::cout << "scenario " << report.scenario_name << ": verdict " << report.verdict
            << ", measure class " << report.measure_class << ", agreement "
            << report.agreement << "\n";
  std::cout << "report bundle written to " << dir << "\n";
  for (const auto& [stage, error] : report.stage_errors)
    std::cerr << "stage " << stage << " failed: " << error << "\n";
  return report.stage_errors.empty() ? 0 : 4;
}

int capacity_command(const std::string& shape, const std::string& method, int dimension,
                     long long paths, double h, std::uint64_t seed) {
  SetSpec set = parse_shape(shape, dimension);
  CapacityEstimate est;
  if (method == "analytic") {
    if (set.kind != ShapeKind::Ball)
      throw ParameterError("analytic capacity is available for balls only");
    est = ball_capacity(set.params.back(), dimension);
  } else if (method == "hitting_mc") {
    if (!set.bounded())
      throw ParameterError("hitting_mc needs a bounded region; truncate the set first");
    McCapacityParams params;
    params.n_paths = paths;
    params.seed = seed;
    est = capacity_hitting_mc(set, 4.0 * *set.outer_radius, params);
  } else if (method == "variational") {
    if (!set.bounded())
      throw ParameterError("variational capacity needs a bounded region");
    VariationalParams params;
    params.h = h * *set.outer_radius;
    est = capacity_variational(set, make_identity_field(dimension), params);
  } else {
    throw ParameterError("method must be analytic | hitting_mc | variational");
  }
  std::cout << "cap(" << shape << ") = " << est.value << "  ci [" << est.ci_low << ", "
            << est.ci_high << "]  method " << to_string(est.method) << "\n";
  if (!est.note.empty()) std::cout << "note: " << est.note << "\n";
  return 0;
}

int verdict_command(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw ParameterError("cannot open '" + csv_path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParameterError("empty shells table");
  std::vector<SeriesTerm> terms;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 7) throw ParameterError("shells table needs term columns 5..7");
    SeriesTerm t;
    t.index = std::stoi(cells[0]);
    t.value = std::stod(cells[4]);
    t.ci = {std::stod(cells[5]), std::stod(cells[6])};
    terms.push_back(t);
  }
  TailDiagnostics diag;
  Verdict verdict = classify(terms, ClassifierConfig{}, &diag);
  std::cout << to_string(verdict) << " (rule " << diag.rule << ")\n";
  return 0;
}

int measure_command(const std::string& scenario_path, const std::string& route,
                    const std::string& dump_paths_file) {
  ScenarioConfig cfg = load_scenario(scenario_path);
  if (route != "pde" && route != "wos") throw ParameterError("route must be pde or wos");
  cfg.measure_routes = {route};
  if (cfg.measure_point.empty())
    throw ParameterError("scenario has no measure.point");
  if (!dump_paths_file.empty() && route == "wos") {
    SetSpec set = cfg.delta_sweep.empty() ? cfg.obstacle() : cfg.obstacle(cfg.delta_sweep.back());
    Vector x(cfg.dimension);
    for (int i = 0; i < cfg.dimension; ++i) x[i] = cfg.measure_point[i];
    WosParams wp;
    wp.eps_shell = cfg.eps_shell;
    wp.escape_radius = cfg.wos_escape_radius;
    wp.n_paths = cfg.wos_paths;
    wp.seed = stream_seed(cfg.seed, 400);
    std::vector<PathRecord> records;
    EscapeEstimate est = wos_escape(set, x, wp, &records);
    std::ofstream out(dump_paths_file);
    out << "path,outcome,steps,max_touch_radius\n";
    for (size_t i = 0; i < records.size(); ++i)
      out << i << "," << static_cast<int>(records[i].outcome) << "," << records[i].steps << ","
          << records[i].max_touch_radius << "\n";
    std::cout << "measure[wos] = " << est.p << " (ci " << est.ci_low << ".." << est.ci_high
              << "), per-path outcomes in " << dump_paths_file << "\n";
    return 0;
  }
  cfg.recurrence = false;
  cfg.form_lambda = false;
  cfg.form_integral = false;
  cfg.a_verdict = false;
  cfg.shell_max = cfg.shell_min;  // measure-only invocation skips the series work
  RunReport report = run_scenario(cfg);
  for (const auto& [stage, error] : report.stage_errors)
    if (stage.rfind("measure", 0) == 0) throw std::runtime_error(stage + ": " + error);
  print_measures(report);
  return 0;
}

int crosscheck_command(const std::string& scenario_path, const std::string& out_dir) {
  ScenarioConfig cfg = load_scenario(scenario_path);
  RunReport report = run_scenario(cfg);
  const std::string dir = resolve_output_dir(cfg, out_dir);
  emit_report(report, dir);
  std::cout << "verdict " << report.verdict << " vs measure class " << report.measure_class
            << " -> " << report.agreement << "\n";
  for (const auto& [stage, error] : report.stage_errors)
    std::cerr << "stage " << stage << " failed: " << error << "\n";
  return crosscheck_exit_code(report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wiener test at infinity: capacities, verdicts, harmonic measure"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir, shape, method = "analytic", csv_path, route = "pde";
  std::string dump_paths_file;
  int dimension = 3;
  long long paths = 100000;
  double h = 0.125;
  std::uint64_t seed = 1;
  bool dump_grids = false;

  auto* run = app.add_subcommand("run", "run a scenario file and write the report bundle");
  run->add_option("scenario", scenario_path, "scenario file")->required();
  run->add_option("--out", out_dir, "output directory override");
  run->add_flag("--dump-grids", dump_grids, "also write binary grid dumps");

  auto* cap = app.add_subcommand("capacity", "estimate the capacity of a canonical shape");
  cap->add_option("shape", shape, "kind:params, e.g. ball:1 or solid_cylinder:1,0")->required();
  cap->add_option("method", method, "analytic | hitting_mc | variational")->required();
  cap->add_option("--dim", dimension, "ambient dimension (>= 3)");
  cap->add_option("--paths", paths, "Monte Carlo path budget");
  cap->add_option("--spacing", h, "grid spacing relative to the region radius");
  cap->add_option("--seed", seed, "random seed");

  auto* verdict = app.add_subcommand("verdict", "classify a shells.csv table");
  verdict->add_option("table", csv_path, "shells.csv produced by 'run'")->required();

  auto* measure = app.add_subcommand("measure", "harmonic measure of infinity for a scenario");
  measure->add_option("scenario", scenario_path, "scenario file")->required();
  measure->add_option("--route", route, "pde | wos")->required();
  measure->add_option("--dump-paths", dump_paths_file, "write per-path outcomes (wos route)");

  auto* cross = app.add_subcommand("crosscheck", "verdict vs measure agreement (exit code)");
  cross->add_option("scenario", scenario_path, "scenario file")->required();
  cross->add_option("--out", out_dir, "output directory override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return run_command(scenario_path, out_dir, dump_grids);
    if (cap->parsed()) return capacity_command(shape, method, dimension, paths, h, seed);
    if (verdict->parsed()) return verdict_command(csv_path);
    if (measure->parsed()) return measure_command(scenario_path, route, dump_paths_file);
    if (cross->parsed()) return crosscheck_command(scenario_path, out_dir);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 1;
}
