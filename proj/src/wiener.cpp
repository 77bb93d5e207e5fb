#include "capinf/wiener.hpp"

#include "capinf/stats.hpp"

#include <algorithm>
#include <cmath>

namespace capinf {

namespace {

constexpr double kHardZero = 1e-12;

SeriesTerm make_term(int index, const CapacityEstimate& gamma, double factor) {
  if (gamma.value < -kHardZero || gamma.ci_low < -kHardZero)
    throw ValidationError("series term " + std::to_string(index) + ": negative capacity input");
  SeriesTerm t;
  t.index = index;
  t.value = std::max(0.0, gamma.value) * factor;
  t.ci = {std::max(0.0, gamma.ci_low) * factor, std::max(0.0, gamma.ci_high) * factor};
  return t;
}

std::vector<Interval> running_sums(const std::vector<SeriesTerm>& terms) {
  std::vector<Interval> sums;
  Interval acc{0.0, 0.0};
  for (const auto& t : terms) {
    acc = acc + t.ci;
    sums.push_back(acc);
  }
  return sums;
}

}  // namespace

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::DivergesRegular: return "DivergesRegular";
    case Verdict::ConvergesIrregular: return "ConvergesIrregular";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "unknown";
}

WienerReport series_terms(const std::vector<CapacityEstimate>& gammas, int n_start,
                          int dimension) {
  require_dimension(dimension);
  WienerReport report;
  report.dimension = dimension;
  for (size_t i = 0; i < gammas.size(); ++i) {
    const int n = n_start + static_cast<int>(i);
    const double factor = std::pow(2.0, -static_cast<double>(n) * (dimension - 2));
    report.terms.push_back(make_term(n, gammas[i], factor));
  }
  report.partial_sums = running_sums(report.terms);
  return report;
}

std::vector<SeriesTerm> lambda_form_terms(const std::vector<CapacityEstimate>& gammas,
                                          int n_start, double lambda) {
  if (lambda <= 1.0) throw ParameterError("lambda_form: lambda must exceed 1");
  std::vector<SeriesTerm> terms;
  for (size_t i = 0; i < gammas.size(); ++i) {
    const int n = n_start + static_cast<int>(i);
    terms.push_back(make_term(n, gammas[i], std::pow(lambda, -n)));
  }
  return terms;
}

Verdict classify(const std::vector<SeriesTerm>& terms, const ClassifierConfig& config,
                 TailDiagnostics* diagnostics) {
  TailDiagnostics diag;
  if (static_cast<int>(terms.size()) < config.min_terms)
    throw InsufficientDataError("classify: need at least " + std::to_string(config.min_terms) +
                                " consecutive terms, got " + std::to_string(terms.size()));
  for (const auto& t : terms)
    if (!std::isfinite(t.ci.high) || !std::isfinite(t.value))
      throw ValidationError("classify: non-finite term or confidence bound");

  double max_width = 0.0;
  double min_value = kInfinity;
  bool all_noise = true;
  for (const auto& t : terms) {
    max_width = std::max(max_width, t.ci.width());
    min_value = std::min(min_value, t.value);
    all_noise = all_noise &&
                t.value <= std::max(config.eps0_floor, config.noise_mult * t.ci.width());
  }
  const double eps0 = std::max(config.eps0_floor, 10.0 * max_width);
  diag.eps0 = eps0;

  auto done = [&](Verdict v, const std::string& rule) {
    diag.rule = rule;
    if (diagnostics) *diagnostics = diag;
    return v;
  };

  // Every term statistically indistinguishable from zero: the partial sums
  // cannot be told apart from a convergent series at this resolution.
  if (all_noise) return done(Verdict::ConvergesIrregular, "below_noise");

  // A tail of hard zeros (bounded sets, exactly-empty shells).
  int trailing_zero = 0;
  for (auto it = terms.rbegin(); it != terms.rend() && it->value <= kHardZero; ++it)
    ++trailing_zero;
  if (trailing_zero >= 3) return done(Verdict::ConvergesIrregular, "vanishing_tail");

  std::vector<double> t_geo, t_pow, y, w;
  for (const auto& t : terms) {
    if (t.value <= 0.0) continue;
    t_geo.push_back(static_cast<double>(t.index));
    t_pow.push_back(std::log(static_cast<double>(t.index)));
    y.push_back(std::log(t.value));
    const double sigma = std::clamp(0.5 * t.ci.width() / t.value, 1e-3, 2.0);
    w.push_back(1.0 / (sigma * sigma));
  }
  diag.fit_points = static_cast<int>(y.size());
  if (y.size() < 4) return done(Verdict::Inconclusive, "none");

  const LineFit geo = weighted_line_fit(t_geo, y, w);
  const LineFit pow_fit = weighted_line_fit(t_pow, y, w);
  diag.geometric_ratio = std::exp(geo.slope);
  diag.geometric_rms = geo.rms_residual;
  diag.power_exponent = pow_fit.slope;
  diag.power_rms = pow_fit.rms_residual;

  if (geo.rms_residual <= pow_fit.rms_residual && geo.rms_residual <= config.fit_accept &&
      diag.geometric_ratio <= 1.0 - config.theta)
    return done(Verdict::ConvergesIrregular, "geometric");

  if (eps0 > 0.0 && min_value >= eps0) return done(Verdict::DivergesRegular, "floor");
  if (pow_fit.rms_residual <= config.fit_accept &&
      diag.power_exponent >= -1.0 - config.power_tol)
    return done(Verdict::DivergesRegular, "power");

  return done(Verdict::Inconclusive, "none");
}

Verdict classify(WienerReport& report, const ClassifierConfig& config) {
  report.verdict = classify(report.terms, config, &report.diagnostics);
  return report.verdict;
}

IntegralForm integral_form(const std::vector<double>& rhos,
                           const std::vector<CapacityEstimate>& cumulative, int dimension,
                           const ClassifierConfig& config) {
  require_dimension(dimension);
  if (rhos.size() != cumulative.size())
    throw ParameterError("integral_form: radii and capacity counts differ");
  if (rhos.size() < 2) throw InsufficientDataError("integral_form: need at least 2 radii");
  if (!std::is_sorted(rhos.begin(), rhos.end()) || rhos.front() < 1.0)
    throw ParameterError("integral_form: radii must be increasing and >= 1");
  for (size_t k = 0; k + 1 < cumulative.size(); ++k) {
    if (cumulative[k + 1].ci_high < cumulative[k].ci_low - kHardZero)
      throw ValidationError("integral_form: cumulative capacity decreases beyond its CI");
  }

  IntegralForm result;
  result.rhos = rhos;
  for (size_t k = 0; k + 1 < rhos.size(); ++k) {
    const double drho = rhos[k + 1] - rhos[k];
    const double f_lo = std::pow(rhos[k], 1 - dimension);
    const double f_hi = std::pow(rhos[k + 1], 1 - dimension);
    SeriesTerm t;
    t.index = static_cast<int>(k + 1);
    t.value = 0.5 * (cumulative[k].value * f_lo + cumulative[k + 1].value * f_hi) * drho;
    t.ci = {0.5 * (std::max(0.0, cumulative[k].ci_low) * f_lo +
                   std::max(0.0, cumulative[k + 1].ci_low) * f_hi) *
                drho,
            0.5 * (cumulative[k].ci_high * f_lo + cumulative[k + 1].ci_high * f_hi) * drho};
    result.increments.push_back(t);
  }
  result.partial_integrals = running_sums(result.increments);
  result.verdict = classify(result.increments, config, &result.diagnostics);
  return result;
}

}  // namespace capinf
