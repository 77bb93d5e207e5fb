#include "capinf/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace capinf {

namespace {

Json estimate_json(const CapacityEstimate& est) {
  Json j;
  j["value"] = est.value;
  j["ci_low"] = est.ci_low;
  j["ci_high"] = est.ci_high;
  j["method"] = to_string(est.method);
  j["samples_or_cells"] = est.samples_or_cells;
  if (est.seed) j["seed"] = *est.seed;
  if (!est.note.empty()) j["note"] = est.note;
  if (!est.metadata.empty()) j["metadata"] = est.metadata;
  return j;
}

Json terms_json(const std::vector<SeriesTerm>& terms, const std::vector<Interval>& sums) {
  Json arr = Json::array();
  for (size_t i = 0; i < terms.size(); ++i) {
    Json j;
    j["n"] = terms[i].index;
    j["term"] = terms[i].value;
    j["ci_low"] = terms[i].ci.low;
    j["ci_high"] = terms[i].ci.high;
    if (i < sums.size()) {
      j["partial_sum"] = sums[i].low + 0.5 * (sums[i].high - sums[i].low);
      j["partial_sum_low"] = sums[i].low;
      j["partial_sum_high"] = sums[i].high;
    }
    arr.push_back(j);
  }
  return arr;
}

Json diagnostics_json(const TailDiagnostics& d) {
  Json j;
  j["rule"] = d.rule;
  j["eps0"] = d.eps0;
  j["geometric_ratio"] = d.geometric_ratio;
  j["geometric_rms"] = d.geometric_rms;
  j["power_exponent"] = d.power_exponent;
  j["power_rms"] = d.power_rms;
  j["fit_points"] = d.fit_points;
  return j;
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

Json to_json(const RunReport& report) {
  Json j;
  j["scenario"] = report.scenario_name;
  j["dimension"] = report.dimension;
  j["seed"] = report.seed;
  j["verdict"] = report.verdict;
  j["measure_class"] = report.measure_class;
  j["agreement"] = report.agreement;

  Json shells = Json::array();
  for (const auto& g : report.shell_gammas) shells.push_back(estimate_json(g));
  j["shell_capacities"] = shells;

  if (!report.delta_sweep.empty()) {
    Json sweep = Json::array();
    for (const auto& [delta, values] : report.delta_sweep) {
      Json row;
      row["delta"] = delta;
      row["gammas"] = values;
      sweep.push_back(row);
    }
    j["delta_sweep"] = sweep;
  }

  Json forms = Json::array();
  for (const auto& f : report.forms) {
    Json fj;
    fj["form"] = f.form;
    fj["verdict"] = to_string(f.verdict);
    fj["terms"] = terms_json(f.terms, f.partial_sums);
    fj["diagnostics"] = diagnostics_json(f.diagnostics);
    forms.push_back(fj);
  }
  j["forms"] = forms;
  if (report.forms_agree) j["forms_agree"] = *report.forms_agree;

  Json measures = Json::array();
  for (const auto& m : report.measures) {
    Json mj;
    mj["route"] = m.route;
    mj["params"] = m.params;
    mj["values"] = m.values;
    mj["final"] = m.final_value;
    mj["ci_low"] = m.ci_low;
    mj["ci_high"] = m.ci_high;
    mj["trend"] = m.trend;
    mj["class"] = m.measure_class;
    measures.push_back(mj);
  }
  j["measures"] = measures;

  if (report.recurrence) {
    Json r;
    r["thresholds"] = report.recurrence->thresholds;
    r["fractions"] = report.recurrence->fraction;
    Json cis = Json::array();
    for (const auto& ci : report.recurrence->ci) cis.push_back({ci.low, ci.high});
    r["ci"] = cis;
    r["n_paths"] = report.recurrence->n_paths;
    r["escape_radius"] = report.recurrence->escape_radius;
    j["recurrence"] = r;
  }

  if (!report.stage_errors.empty()) j["stage_errors"] = report.stage_errors;
  j["provenance"] = report.provenance;
  j["timings"] = report.timings_seconds;
  return j;
}

void emit_report(const RunReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("emit_report: cannot create '" + dir + "': " + ec.message());

  {
    std::ofstream out(dir + "/report.json");
    if (!out) throw std::runtime_error("emit_report: cannot write " + dir + "/report.json");
    out << to_json(report).dump(2) << "\n";
  }

  {
    std::ofstream out(dir + "/shells.csv");
    if (!out) throw std::runtime_error("emit_report: cannot write " + dir + "/shells.csv");
    out << "n,gamma,gamma_ci_low,gamma_ci_high,term,term_ci_low,term_ci_high,"
           "partial_sum,partial_sum_low,partial_sum_high,method\n";
    const FormVerdict* dyadic = nullptr;
    for (const auto& f : report.forms)
      if (f.form == "dyadic") dyadic = &f;
    for (size_t i = 0; i < report.shell_gammas.size(); ++i) {
      const auto& g = report.shell_gammas[i];
      const int n = static_cast<int>(g.metadata.count("shell_index")
                                         ? g.metadata.at("shell_index")
                                         : static_cast<double>(i));
      out << n << "," << format_number(g.value) << "," << format_number(g.ci_low) << ","
          << format_number(g.ci_high);
      if (dyadic && i < dyadic->terms.size()) {
        const auto& t = dyadic->terms[i];
        const auto& s = dyadic->partial_sums[i];
        out << "," << format_number(t.value) << "," << format_number(t.ci.low) << ","
            << format_number(t.ci.high) << "," << format_number(0.5 * (s.low + s.high)) << ","
            << format_number(s.low) << "," << format_number(s.high);
      } else {
        out << ",,,,,,";
      }
      out << "," << to_string(g.method) << "\n";
    }
  }

  {
    std::ofstream out(dir + "/measures.csv");
    if (!out) throw std::runtime_error("emit_report: cannot write " + dir + "/measures.csv");
    out << "route,parameter,value,ci_low,ci_high\n";
    for (const auto& m : report.measures) {
      for (size_t i = 0; i < m.params.size() && i < m.values.size(); ++i)
        out << m.route << "," << format_number(m.params[i]) << ","
            << format_number(m.values[i]) << ",,\n";
      out << m.route << ",final," << format_number(m.final_value) << ","
          << format_number(m.ci_low) << "," << format_number(m.ci_high) << "\n";
    }
    if (report.recurrence) {
      for (size_t i = 0; i < report.recurrence->thresholds.size(); ++i)
        out << "recurrence," << report.recurrence->thresholds[i] << ","
            << format_number(report.recurrence->fraction[i]) << ","
            << format_number(report.recurrence->ci[i].low) << ","
            << format_number(report.recurrence->ci[i].high) << "\n";
    }
  }
}

namespace {

void validate_node(const Json& doc, const Json& schema, const std::string& path,
                   std::vector<std::string>& errors) {
  if (schema.contains("type")) {
    const std::string type = schema["type"];
    bool ok = (type == "object" && doc.is_object()) || (type == "array" && doc.is_array()) ||
              (type == "string" && doc.is_string()) || (type == "number" && doc.is_number()) ||
              (type == "integer" && doc.is_number_integer()) ||
              (type == "boolean" && doc.is_boolean());
    if (!ok) {
      errors.push_back(path + ": expected " + type);
      return;
    }
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& v : schema["enum"]) ok = ok || v == doc;
    if (!ok) errors.push_back(path + ": value not in enum");
  }
  if (schema.contains("required")) {
    for (const auto& key : schema["required"])
      if (!doc.contains(key.get<std::string>()))
        errors.push_back(path + ": missing required key '" + key.get<std::string>() + "'");
  }
  if (schema.contains("properties") && doc.is_object()) {
    for (auto it = schema["properties"].begin(); it != schema["properties"].end(); ++it) {
      if (doc.contains(it.key()))
        validate_node(doc[it.key()], it.value(), path + "/" + it.key(), errors);
    }
  }
  if (schema.contains("items") && doc.is_array()) {
    for (size_t i = 0; i < doc.size(); ++i)
      validate_node(doc[i], schema["items"], path + "[" + std::to_string(i) + "]", errors);
  }
}

}  // namespace

std::vector<std::string> validate_against_schema(const Json& document, const Json& schema) {
  std::vector<std::string> errors;
  validate_node(document, schema, "", errors);
  return errors;
}

Json report_schema() {
  static const char* text = R"({
  "type": "object",
  "required": ["scenario", "dimension", "seed", "verdict", "measure_class", "agreement",
               "shell_capacities", "forms", "measures", "provenance", "timings"],
  "properties": {
    "scenario": {"type": "string"},
    "dimension": {"type": "integer"},
    "verdict": {"enum": ["DivergesRegular", "ConvergesIrregular", "Inconclusive"]},
    "measure_class": {"enum": ["regular", "irregular", "unclassified"]},
    "agreement": {"enum": ["match", "mismatch", "unclassified"]},
    "shell_capacities": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["value", "ci_low", "ci_high", "method"],
        "properties": {
          "value": {"type": "number"},
          "ci_low": {"type": "number"},
          "ci_high": {"type": "number"},
          "method": {"enum": ["analytic", "hitting_mc", "variational"]}
        }
      }
    },
    "forms": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["form", "verdict", "terms", "diagnostics"],
        "properties": {
          "form": {"enum": ["dyadic", "lambda", "integral", "a_capacity"]},
          "verdict": {"enum": ["DivergesRegular", "ConvergesIrregular", "Inconclusive"]},
          "terms": {
            "type": "array",
            "items": {
              "type": "object",
              "required": ["n", "term", "ci_low", "ci_high"],
              "properties": {
                "n": {"type": "integer"},
                "term": {"type": "number"}
              }
            }
          }
        }
      }
    },
    "measures": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["route", "params", "values", "final", "trend", "class"],
        "properties": {
          "route": {"enum": ["pde", "wos"]},
          "final": {"type": "number"},
          "trend": {"enum": ["decreasing", "flat"]},
          "class": {"enum": ["regular", "irregular", "unclassified"]}
        }
      }
    },
    "provenance": {"type": "object"},
    "timings": {"type": "object"}
  }
})";
  return Json::parse(text);
}

int crosscheck_exit_code(const RunReport& report) {
  if (report.agreement == "match") return 0;
  if (report.agreement == "mismatch") return 2;
  return 3;
}

}  // namespace capinf
