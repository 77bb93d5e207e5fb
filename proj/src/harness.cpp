#include "capinf/harness.hpp"

#include "capinf/rng.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <optional>

namespace capinf {

namespace {

class StageTimer {
 public:
  StageTimer(RunReport& report, std::string name)
      : report_(report), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    const auto end = std::chrono::steady_clock::now();
    report_.timings_seconds[name_] =
        std::chrono::duration_cast<std::chrono::duration<double>>(end - start_).count();
  }

 private:
  RunReport& report_;
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

template <typename Fn>
void stage(RunReport& report, const std::string& name, Fn&& fn) {
  StageTimer timer(report, name);
  try {
    fn();
  } catch (const std::exception& e) {
    report.stage_errors[name] = e.what();
  }
}

ShellCapacityParams mc_shell_params(const ScenarioConfig& cfg, std::uint64_t stage_tag) {
  ShellCapacityParams p;
  p.method = CapacityMethod::HittingMc;
  p.mc.n_paths = cfg.shell_paths;
  p.mc.seed = stream_seed(cfg.seed, stage_tag);
  p.mc.eps_shell = cfg.eps_shell;
  return p;
}

std::string verdict_of_form(const RunReport& report, const std::string& form) {
  for (const auto& f : report.forms)
    if (f.form == form) return to_string(f.verdict);
  return to_string(Verdict::Inconclusive);
}

MeasureRecord classify_record(MeasureRecord record, const ScenarioConfig& cfg) {
  auto [trend, cls] = classify_measure(record.values, record.final_value, cfg.tau0, cfg.tau1,
                                       cfg.trend_tol);
  record.trend = trend;
  record.measure_class = cls;
  return record;
}

}  // namespace

std::pair<std::string, std::string> classify_measure(const std::vector<double>& values,
                                                     double final_value, double tau0,
                                                     double tau1, double trend_tol) {
  double drop = 0.0;
  if (values.size() >= 2 && values.front() > 1e-12)
    drop = (values.front() - values.back()) / values.front();
  const std::string trend = drop > trend_tol ? "decreasing" : "flat";
  std::string cls = "unclassified";
  if (final_value <= tau0 && trend == "decreasing") cls = "regular";
  else if (final_value >= tau1 && trend == "flat") cls = "irregular";
  return {trend, cls};
}

RunReport run_scenario(const ScenarioConfig& cfg) {
  RunReport report;
  report.scenario_name = cfg.name;
  report.dimension = cfg.dimension;
  report.seed = cfg.seed;

  report.provenance["shell_range"] = {cfg.shell_min, cfg.shell_max};
  report.provenance["shell_paths"] = cfg.shell_paths;
  report.provenance["wos_paths"] = cfg.wos_paths;
  report.provenance["obstacle"] = cfg.obstacle_kind;
  report.provenance["field"] = make_field(cfg.field_kind, cfg.dimension, cfg.field_lambda,
                                          cfg.field_cell, cfg.seed)
                                   .describe();
  report.provenance["classifier"] = {{"theta", cfg.classifier.theta},
                                     {"power_tol", cfg.classifier.power_tol},
                                     {"eps0_floor", cfg.classifier.eps0_floor},
                                     {"fit_accept", cfg.classifier.fit_accept},
                                     {"min_terms", cfg.classifier.min_terms}};
  report.provenance["normalization"] =
      "capacities in kernel units, cap(ball R) = R^{N-2}; variational energies divided by "
      "(N-2) * area(S^{N-1})";
  report.provenance["version"] = "capinf 0.1";

  const bool sweep = !cfg.delta_sweep.empty();
  SetSpec obstacle = sweep ? cfg.obstacle(cfg.delta_sweep.back()) : cfg.obstacle();
  const CoefficientField field =
      make_field(cfg.field_kind, cfg.dimension, cfg.field_lambda, cfg.field_cell, cfg.seed);

  stage(report, "shells", [&] {
    if (sweep) {
      for (size_t i = 0; i < cfg.delta_sweep.size(); ++i) {
        const double delta = cfg.delta_sweep[i];
        SetSpec set = cfg.obstacle(delta);
        auto gammas = shell_capacities(set, cfg.shell_min, cfg.shell_max,
                                       mc_shell_params(cfg, 100 + i));
        std::vector<double> values;
        for (const auto& g : gammas) values.push_back(g.value);
        report.delta_sweep[delta] = values;
        if (i + 1 == cfg.delta_sweep.size()) report.shell_gammas = std::move(gammas);
      }
    } else {
      report.shell_gammas =
          shell_capacities(obstacle, cfg.shell_min, cfg.shell_max, mc_shell_params(cfg, 100));
    }
  });

  stage(report, "wiener_dyadic", [&] {
    WienerReport wr = series_terms(report.shell_gammas, cfg.shell_min, cfg.dimension);
    classify(wr, cfg.classifier);
    report.verdict = to_string(wr.verdict);
    report.forms.push_back(
        {"dyadic", wr.terms, wr.partial_sums, wr.verdict, wr.diagnostics});
  });

  if (cfg.form_lambda) {
    stage(report, "wiener_lambda", [&] {
      const double lambda = cfg.lambda_level;
      // level shells covering the same radial range as the dyadic ones: the
      // level index k corresponds to radius lambda^{k/(N-2)}
      const double per_octave = (cfg.dimension - 2) * std::log(2.0) / std::log(lambda);
      const int n_min = std::max(1, static_cast<int>(std::ceil(
                                         (cfg.shell_min - 1) * per_octave)) + 1);
      const int n_max = std::max(n_min + cfg.classifier.min_terms - 1,
                                 static_cast<int>(std::floor(cfg.shell_max * per_octave)));
      auto gammas =
          lambda_shell_capacities(obstacle, lambda, n_min, n_max, mc_shell_params(cfg, 200));
      FormVerdict f;
      f.form = "lambda";
      f.terms = lambda_form_terms(gammas, n_min, lambda);
      Interval acc{0, 0};
      for (const auto& t : f.terms) f.partial_sums.push_back(acc = acc + t.ci);
      f.verdict = classify(f.terms, cfg.classifier, &f.diagnostics);
      report.forms.push_back(std::move(f));
    });
  }

  if (cfg.form_integral) {
    stage(report, "wiener_integral", [&] {
      std::vector<double> rhos;
      std::vector<CapacityEstimate> cs;
      ShellCapacityParams params = mc_shell_params(cfg, 300);
      for (int k = 0; k <= cfg.shell_max - 1; ++k) {
        const double rho = std::pow(2.0, k);
        rhos.push_back(rho);
        cs.push_back(cumulative_capacity(obstacle, rho, params));
      }
      IntegralForm integral = integral_form(rhos, cs, cfg.dimension, cfg.classifier);
      report.forms.push_back({"integral", integral.increments, integral.partial_integrals,
                              integral.verdict, integral.diagnostics});
    });
  }

  if (cfg.a_verdict) {
    stage(report, "wiener_a_capacity", [&] {
      ShellCapacityParams params;
      params.method = CapacityMethod::Variational;
      params.variational.h = cfg.a_grid_h;
      params.variational.refine = false;  // the verdict needs growth class, not brackets
      params.variational.solve.rel_tol = 1e-7;
      // keep roughly three cells per feature at every shell, so the raster
      // factor stays flat in n and cannot bend the growth class
      params.variational.h_floor = 1.0 / 384;
      const CoefficientField a_field =
          make_checkerboard_field(cfg.dimension, cfg.a_lambda, cfg.a_cell);
      auto gammas = shell_capacities(obstacle, cfg.a_shell_min, cfg.a_shell_max, params,
                                     &a_field);
      WienerReport wr = series_terms(gammas, cfg.a_shell_min, cfg.dimension);
      ClassifierConfig acfg = cfg.classifier;
      acfg.min_terms = std::min(acfg.min_terms, cfg.a_shell_max - cfg.a_shell_min + 1);
      classify(wr, acfg);
      report.forms.push_back(
          {"a_capacity", wr.terms, wr.partial_sums, wr.verdict, wr.diagnostics});
    });
  }

  {
    bool agree = true;
    std::optional<Verdict> first;
    for (const auto& f : report.forms) {
      if (f.verdict == Verdict::Inconclusive) continue;
      if (!first) first = f.verdict;
      else agree = agree && *first == f.verdict;
    }
    if (report.forms.size() > 1) report.forms_agree = agree;
  }

  for (const auto& route : cfg.measure_routes) {
    stage(report, "measure_" + route, [&] {
      Vector x(cfg.dimension);
      for (int i = 0; i < cfg.dimension; ++i) x[i] = cfg.measure_point[i];
      MeasureRecord record;
      record.route = route;
      if (route == "pde") {
        std::vector<double> radii = cfg.pde_radii;
        if (radii.empty()) {
          double r = std::max(8.0, std::exp2(std::ceil(std::log2(2.0 * x.norm() + 1e-9))));
          radii = {r, 2 * r, 4 * r};
        }
        MeasurePdeResult pde = harmonic_measure_pde(obstacle, x, radii, field, cfg.pde_h);
        record.params = pde.radii;
        record.values = pde.values;
        record.final_value = pde.extrapolated;
        record.ci_low = std::max(0.0, pde.extrapolated - pde.ci_halfwidth);
        record.ci_high = std::min(1.0, pde.extrapolated + pde.ci_halfwidth);
      } else {
        WosParams wp;
        wp.eps_shell = cfg.eps_shell;
        wp.escape_radius = cfg.wos_escape_radius;
        wp.n_paths = cfg.wos_paths;
        wp.seed = stream_seed(cfg.seed, 400);
        EscapeEstimate est = wos_escape(obstacle, x, wp);
        for (const auto& [radius, value] : est.raw) {
          record.params.push_back(radius);
          record.values.push_back(value);
        }
        record.final_value = est.p;
        record.ci_low = est.ci_low;
        record.ci_high = est.ci_high;
      }
      report.measures.push_back(classify_record(std::move(record), cfg));
    });
  }

  if (cfg.recurrence) {
    stage(report, "recurrence", [&] {
      Vector x(cfg.dimension);
      for (int i = 0; i < cfg.dimension; ++i) x[i] = cfg.measure_point[i];
      WosParams wp;
      wp.eps_shell = cfg.eps_shell;
      wp.n_paths = cfg.recurrence_paths;
      wp.seed = stream_seed(cfg.seed, 500);
      report.recurrence =
          recurrence_experiment(obstacle, x, cfg.recurrence_thresholds, wp);
    });
  }

  {
    std::string combined = "unclassified";
    bool conflict = false;
    for (const auto& m : report.measures) {
      if (m.measure_class == "unclassified") continue;
      if (combined == "unclassified") combined = m.measure_class;
      else if (combined != m.measure_class) conflict = true;
    }
    report.measure_class = conflict ? "unclassified" : combined;

    const std::string verdict = report.verdict;
    if (verdict == to_string(Verdict::Inconclusive) || report.measure_class == "unclassified") {
      report.agreement = "unclassified";
    } else {
      const bool match =
          (verdict == to_string(Verdict::DivergesRegular) && report.measure_class == "regular") ||
          (verdict == to_string(Verdict::ConvergesIrregular) &&
           report.measure_class == "irregular");
      report.agreement = match ? "match" : "mismatch";
      if (conflict) report.agreement = "mismatch";
    }
  }
  return report;
}

std::string resolve_output_dir(const ScenarioConfig& cfg, const std::string& override_dir) {
  if (!override_dir.empty()) return override_dir;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  if (const char* env = std::getenv("CAPINF_OUTPUT_DIR")) return std::string(env) + "/" + cfg.name;
  return "out/" + cfg.name;
}

}  // namespace capinf
