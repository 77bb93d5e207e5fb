// Acceptance suite: the contract of the toolkit, one test case per criterion,
// each printing a single PASS/FAIL line. Budgets and seeds are pinned here;
// everything runs single-threaded in well under the ctest timeout.

#include "capinf/harness.hpp"
#include "capinf/stats.hpp"

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>

using namespace capinf;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct CriterionReporter {
  int id;
  std::string title;
  bool ok = true;

  CriterionReporter(int id, std::string title) : id(id), title(std::move(title)) {}
  ~CriterionReporter() {
    std::cout << "[criterion " << id << "] " << (ok ? "PASS" : "FAIL") << " - " << title
              << std::endl;
  }
  void require(bool condition, const std::string& what) {
    ok = ok && condition;
    CHECK_MESSAGE(condition, what);
  }
};

Vector point3(double x, double y, double z) {
  Vector p(3);
  p << x, y, z;
  return p;
}

/// Gallery scenario reports, computed once and shared across criteria.
const RunReport& gallery(const std::string& name) {
  static std::map<std::string, RunReport> cache;
  auto it = cache.find(name);
  if (it == cache.end()) {
    ScenarioConfig cfg =
        load_scenario(std::string(CAPINF_SCENARIO_DIR) + "/" + name + ".toml");
    std::cout << "  [gallery] running scenario " << name << " ..." << std::endl;
    it = cache.emplace(name, run_scenario(cfg)).first;
  }
  return it->second;
}

const std::vector<std::string> kGallery = {"ball",       "full_space",    "cylinder",
                                           "thin_ray",   "thorn_half",    "thorn_one",
                                           "dyadic_growing", "dyadic_const"};

std::string form_verdict(const RunReport& report, const std::string& form) {
  for (const auto& f : report.forms)
    if (f.form == form) return to_string(f.verdict);
  return "missing";
}

int run_cli(const std::string& args) {
  const std::string command = std::string(CAPINF_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("criterion 1: unit-ball capacity three ways") {
  CriterionReporter crit(1, "ball capacity: analytic exact, hitting-MC and variational within 5%");
  SetSpec ball = make_canonical(ShapeKind::Ball, {1.0}, 3);

  CapacityEstimate analytic = ball_capacity(1.0, 3);
  crit.require(analytic.value == 1.0, "analytic value is exactly 1");
  crit.require(analytic.ci_low == 1.0 && analytic.ci_high == 1.0, "analytic CI is a point");

  auto t0 = Clock::now();
  McCapacityParams mc;
  mc.n_paths = 100000;
  mc.seed = 20260810;
  CapacityEstimate hit = capacity_hitting_mc(ball, 8.0, mc);
  const double t_mc = seconds_since(t0);
  MESSAGE("hitting-MC: ", hit.value, " in ", t_mc, " s");
  crit.require(std::abs(hit.value - 1.0) <= 0.05, "hitting-MC within 5%");
  crit.require(t_mc <= 60.0, "hitting-MC under 60 s");

  t0 = Clock::now();
  VariationalParams vp;
  vp.h = 1.0 / 8;
  CapacityEstimate var = capacity_variational(ball, make_identity_field(3), vp);
  const double t_var = seconds_since(t0);
  MESSAGE("variational: ", var.value, " in ", t_var, " s");
  crit.require(std::abs(var.value - 1.0) <= 0.05, "variational within 5% at the finer grid");
  crit.require(t_var <= 60.0, "variational under 60 s");
}

TEST_CASE("criterion 2: capacity scaling in N = 3 and N = 4") {
  CriterionReporter crit(2, "cap(ball 2R)/cap(ball R) = 2^{N-2} for both estimators, N=3,4");
  for (int dimension : {3, 4}) {
    const double target = std::pow(2.0, dimension - 2);
    SetSpec small = make_canonical(ShapeKind::Ball, {1.0}, dimension);
    SetSpec large = make_canonical(ShapeKind::Ball, {2.0}, dimension);

    McCapacityParams mc;
    mc.n_paths = 100000;
    mc.seed = 31 + dimension;
    CapacityEstimate m1 = capacity_hitting_mc(small, 8.0, mc);
    mc.seed = 47 + dimension;
    CapacityEstimate m2 = capacity_hitting_mc(large, 16.0, mc);
    const double mc_ratio = m2.value / m1.value;
    const double mc_rel_ci = (m1.ci_high - m1.ci_low) / m1.value +
                             (m2.ci_high - m2.ci_low) / m2.value;
    MESSAGE("N=", dimension, " MC ratio ", mc_ratio, " rel ci ", mc_rel_ci);
    crit.require(std::abs(mc_ratio / target - 1.0) <= 2.0 * mc_rel_ci,
                 "hitting-MC scaling within twice the combined relative CI");

    VariationalParams vp;
    vp.h = dimension == 3 ? 1.0 / 8 : 1.0 / 3;
    CoefficientField id = make_identity_field(dimension);
    CapacityEstimate v1 = capacity_variational(small, id, vp);
    vp.h *= 2.0;  // matched relative resolution for the doubled ball
    CapacityEstimate v2 = capacity_variational(large, id, vp);
    const double var_ratio = v2.value / v1.value;
    const double var_rel_ci = (v1.ci_high - v1.ci_low) / v1.value +
                              (v2.ci_high - v2.ci_low) / v2.value;
    MESSAGE("N=", dimension, " variational ratio ", var_ratio, " rel ci ", var_rel_ci);
    crit.require(std::abs(var_ratio / target - 1.0) <= 2.0 * var_rel_ci,
                 "variational scaling within twice the combined relative CI");
  }
}

TEST_CASE("criterion 3: operator comparability") {
  CriterionReporter crit(3, "checkerboard capacities bounded and verdict operator-independent");

  SetSpec ball = make_canonical(ShapeKind::Ball, {1.0}, 3);
  VariationalParams vp;
  vp.h = 1.0 / 8;
  CoefficientField rough = make_checkerboard_field(3, 4.0, 0.93);
  CapacityEstimate cap = capacity_variational(ball, rough, vp);
  MESSAGE("checkerboard lambda=4 ball capacity: ", cap.value);
  crit.require(cap.value >= 1.0 / 16 && cap.value <= 16.0,
               "cap under lambda=4 field inside the hard comparability window");

  for (const auto& name : kGallery) {
    const RunReport& report = gallery(name);
    const std::string laplace = report.verdict;
    const std::string through_field = form_verdict(report, "a_capacity");
    MESSAGE(name, ": laplace ", laplace, " vs field ", through_field);
    crit.require(through_field == laplace,
                 name + ": verdict from field capacities equals the Laplace verdict");
  }
}

TEST_CASE("criterion 4: exterior-ball harmonic measure at |x| = 2") {
  CriterionReporter crit(4, "harmonic measure 1/2: walk-on-spheres +-0.02, truncated solves +-0.01");
  SetSpec ball = make_canonical(ShapeKind::Ball, {1.0}, 3);

  WosParams wp;
  wp.n_paths = 100000;
  wp.escape_radius = 32.0;
  wp.seed = 424242;
  EscapeEstimate wos = wos_escape(ball, point3(2, 0, 0), wp);
  MESSAGE("wos estimate: ", wos.p, " ci [", wos.ci_low, ",", wos.ci_high, "]");
  crit.require(std::abs(wos.p - 0.5) <= 0.02, "walk-on-spheres within 0.02 of 1/2");

  PdeMeasureOptions options;
  options.h = 1.0 / 24;
  options.fine_radius = 2.5;
  MeasurePdeResult pde =
      harmonic_measure_pde(ball, point3(2, 0, 0), {4, 8, 16}, make_identity_field(3), options);
  MESSAGE("pde values: ", pde.values[0], " ", pde.values[1], " ", pde.values[2],
          " extrapolated ", pde.extrapolated);
  for (size_t i = 1; i < pde.values.size(); ++i)
    crit.require(pde.values[i] <= pde.values[i - 1] + 1e-12, "truncated sequence nonincreasing");
  crit.require(std::abs(pde.extrapolated - 0.5) <= 0.01,
               "tail-extrapolated solve within 0.01 of 1/2");
}

TEST_CASE("criterion 5: cylinder scenario") {
  CriterionReporter crit(5, "cylinder: shell growth c 2^n/n, divergent verdict, vanishing measure");
  auto t0 = Clock::now();
  SetSpec cylinder = make_canonical(ShapeKind::SolidCylinder, {1.0, 0.0}, 3);

  // shell capacities against the c 2^n / n growth model over n = 4..10,
  // c fitted as the Chebyshev center of the log offsets
  ShellCapacityParams sp;
  sp.mc.n_paths = 400000;
  sp.mc.seed = 55;
  auto gammas = shell_capacities(cylinder, 4, 10, sp);
  std::vector<double> logs;
  for (size_t i = 0; i < gammas.size(); ++i) {
    const int n = 4 + static_cast<int>(i);
    logs.push_back(std::log(gammas[i].value * n / std::pow(2.0, n)));
  }
  const double center =
      0.5 * (*std::max_element(logs.begin(), logs.end()) +
             *std::min_element(logs.begin(), logs.end()));
  double worst = 0.0;
  for (double l : logs) worst = std::max(worst, std::abs(std::exp(l - center) - 1.0));
  MESSAGE("fitted c = ", std::exp(center), ", worst relative residual ", worst);
  crit.require(worst < 0.20, "relative residuals of the 2^n/n fit below 20% for n=4..10");

  // divergence verdict over the configured shell range
  ShellCapacityParams verdict_params;
  verdict_params.mc.n_paths = 200000;
  verdict_params.mc.seed = 56;
  WienerReport series = series_terms(shell_capacities(cylinder, 2, 12, verdict_params), 2, 3);
  classify(series);
  MESSAGE("cylinder verdict: ", to_string(series.verdict));
  crit.require(series.verdict == Verdict::DivergesRegular, "verdict DivergesRegular");

  // harmonic measure by truncated solves: small and falling
  MeasurePdeResult pde = harmonic_measure_pde(cylinder, point3(3.5, 1.5, 0), {8, 16, 32, 64},
                                              make_identity_field(3), 0.5);
  MESSAGE("cylinder measure values: ", pde.values[0], " ", pde.values[1], " ", pde.values[2],
          " ", pde.values[3], " extrapolated ", pde.extrapolated);
  for (size_t i = 1; i < pde.values.size(); ++i)
    crit.require(pde.values[i] <= pde.values[i - 1] + 1e-12, "measure nonincreasing in R");
  crit.require(pde.extrapolated <= 0.1, "measure estimate at most 0.1");

  const double elapsed = seconds_since(t0);
  MESSAGE("criterion 5 runtime: ", elapsed, " s");
  crit.require(elapsed <= 600.0, "total runtime within 10 minutes");
}

TEST_CASE("criterion 6: thin-ray scenario") {
  CriterionReporter crit(6, "thin ray: capacity falls with thickness, convergent verdict, escape");
  const RunReport& report = gallery("thin_ray");

  // per-shell capacities strictly decreasing along the thickness sweep
  REQUIRE(report.delta_sweep.size() == 3);
  std::vector<std::pair<double, std::vector<double>>> sweep(report.delta_sweep.begin(),
                                                            report.delta_sweep.end());
  // map iteration is ascending in delta: finest first
  for (size_t k = 0; k + 1 < sweep.size(); ++k) {
    const auto& finer = sweep[k].second;
    const auto& coarser = sweep[k + 1].second;
    for (size_t i = 0; i < finer.size(); ++i)
      crit.require(finer[i] < coarser[i],
                   "shell capacity strictly decreasing in the thickness");
  }

  crit.require(report.verdict == "ConvergesIrregular",
               "verdict ConvergesIrregular at the finest thickness");

  REQUIRE(report.recurrence.has_value());
  const auto& rec = *report.recurrence;
  for (size_t i = 0; i < rec.thresholds.size(); ++i) {
    if (rec.thresholds[i] == 8)
      crit.require(rec.fraction[i] < 0.1, "recurrence fraction below 0.1 by m = 8");
  }

  REQUIRE(!report.measures.empty());
  crit.require(report.measures[0].final_value >= 0.9, "measure estimate at least 0.9");
}

TEST_CASE("criterion 7: solver identity suite") {
  CriterionReporter crit(7, "max principle to 1e-12, linearity and complement identity to 1e-8");
  SolveParams params;
  params.rel_tol = 1e-13;
  const BoundaryData g{[](const Vector& x) { return 0.5 + 0.3 * std::cos(x[0]); },
                       [](const Vector& x) { return 0.25 + 0.1 * std::sin(x[1]); }};
  const double a = 1.75, b = -0.4;
  const BoundaryData ag_plus_b{[&](const Vector& x) { return a * g.obstacle(x) + b; },
                               [&](const Vector& x) { return a * g.outer(x) + b; }};
  const BoundaryData one_minus_g{[&](const Vector& x) { return 1.0 - g.obstacle(x); },
                                 [&](const Vector& x) { return 1.0 - g.outer(x); }};

  for (const auto& name : kGallery) {
    ScenarioConfig cfg =
        load_scenario(std::string(CAPINF_SCENARIO_DIR) + "/" + name + ".toml");
    SetSpec obstacle =
        cfg.delta_sweep.empty() ? cfg.obstacle() : cfg.obstacle(cfg.delta_sweep.back());
    GridPtr grid = make_uniform_sphere_grid(3, 8.0, 0.25, &obstacle);
    for (const CoefficientField& field :
         {make_identity_field(3), make_checkerboard_field(3, 2.0, 0.93)}) {
      GridFunction u = solve_dirichlet(grid, field, g, params);
      // bounds of the actually prescribed boundary values
      double bc_lo = 1e300, bc_hi = -1e300, max_violation = 0.0;
      std::vector<long long> idx(3);
      Vector x(3);
      for (long long c = 0; c < grid->total_cells; ++c) {
        if (grid->klass(c) == CellClass::Interior) continue;
        bc_lo = std::min(bc_lo, u.values[c]);
        bc_hi = std::max(bc_hi, u.values[c]);
      }
      for (long long c = 0; c < grid->total_cells; ++c) {
        max_violation = std::max(max_violation, bc_lo - u.values[c]);
        max_violation = std::max(max_violation, u.values[c] - bc_hi);
      }
      crit.require(max_violation <= 1e-12,
                   name + "/" + field.describe() + ": maximum principle to 1e-12");

      GridFunction v = solve_dirichlet(grid, field, ag_plus_b, params);
      double linear_defect = 0.0;
      for (long long c = 0; c < grid->total_cells; ++c)
        linear_defect = std::max(linear_defect, std::abs(v.values[c] - (a * u.values[c] + b)));
      crit.require(linear_defect <= 1e-8,
                   name + "/" + field.describe() + ": linearity to 1e-8");

      GridFunction w = solve_dirichlet(grid, field, one_minus_g, params);
      double complement_defect = 0.0;
      for (long long c = 0; c < grid->total_cells; ++c)
        complement_defect =
            std::max(complement_defect, std::abs(w.values[c] - (1.0 - u.values[c])));
      crit.require(complement_defect <= 1e-8,
                   name + "/" + field.describe() + ": complement identity to 1e-8");
    }
  }
}

TEST_CASE("criterion 8: discrete green function comparability") {
  CriterionReporter crit(8, "green function kernel band: 10% identity, stable rough band");
  const double R = 4.0;
  const Vector y = point3(1.0 / 16, 1.0 / 16, 1.0 / 16);

  auto products = [&](const CoefficientField& field, double h) {
    GridPtr grid = make_uniform_sphere_grid(3, R, h, nullptr);
    GridFunction g = discrete_green(grid, field, y);
    std::pair<double, double> band{1e300, -1e300};
    for (double r = 3.0 * h; r <= R / 4 + 1e-9; r += std::max(h, (R / 4 - 3 * h) / 8)) {
      for (int axis = 0; axis < 3; ++axis) {
        for (int sign : {-1, 1}) {
          Vector x = y;
          x[axis] += sign * r;
          const double product = g.interpolate(x) / (1.0 / r - 1.0 / R);
          band.first = std::min(band.first, product);
          band.second = std::max(band.second, product);
        }
      }
    }
    return band;
  };

  const auto identity_band = products(make_identity_field(3), 1.0 / 8);
  MESSAGE("identity band: [", identity_band.first, ",", identity_band.second, "]");
  crit.require(identity_band.first >= 0.9 && identity_band.second <= 1.1,
               "identity-field product within 10% of the truncated kernel");

  CoefficientField rough = make_checkerboard_field(3, 2.0, 0.93);
  const auto coarse = products(rough, 1.0 / 8);
  const auto fine = products(rough, 1.0 / 16);
  MESSAGE("rough bands: coarse [", coarse.first, ",", coarse.second, "] fine [", fine.first,
          ",", fine.second, "]");
  crit.require(coarse.first > 0.0, "rough-field products positive");
  crit.require(fine.first / coarse.first >= 1.0 / 1.2 && fine.first / coarse.first <= 1.2,
               "lower band edge stable within 20% under refinement");
  crit.require(fine.second / coarse.second >= 1.0 / 1.2 && fine.second / coarse.second <= 1.2,
               "upper band edge stable within 20% under refinement");
}

TEST_CASE("criterion 9: crosscheck exit codes") {
  CriterionReporter crit(9, "crosscheck: exit 0 on known scenarios, thorn never a mismatch");
  namespace fs = std::filesystem;
  const std::string tmp = (fs::temp_directory_path() / "capinf_crosscheck").string();

  for (const char* name : {"ball", "full_space", "cylinder", "thin_ray"}) {
    const int code = run_cli("crosscheck " + std::string(CAPINF_SCENARIO_DIR) + "/" + name +
                             ".toml --out " + tmp + "/" + name);
    MESSAGE(name, ": exit ", code);
    crit.require(code == 0, std::string(name) + ": crosscheck exits 0");
  }
  for (const char* name : {"thorn_half", "thorn_one"}) {
    const int code = run_cli("crosscheck " + std::string(CAPINF_SCENARIO_DIR) + "/" + name +
                             ".toml --out " + tmp + "/" + name);
    MESSAGE(name, ": exit ", code);
    crit.require(code == 0 || code == 3,
                 std::string(name) + ": unclassified allowed, mismatch is not");
  }
  fs::remove_all(tmp);
}

TEST_CASE("criterion 10: the three series forms agree") {
  CriterionReporter crit(10, "dyadic, level-shell and integral classifiers agree per scenario");
  for (const auto& name : kGallery) {
    const RunReport& report = gallery(name);
    std::string committed;
    bool agree = true;
    for (const auto& f : report.forms) {
      const std::string v = to_string(f.verdict);
      if (v == to_string(Verdict::Inconclusive)) continue;
      if (committed.empty()) committed = v;
      agree = agree && committed == v;
    }
    MESSAGE(name, ": committed verdicts agree = ", agree);
    crit.require(agree, name + ": no two conclusive forms disagree");
    crit.require(report.forms_agree.value_or(true), name + ": report records agreement");
  }
}
