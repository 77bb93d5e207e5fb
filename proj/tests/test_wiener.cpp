#include "capinf/wiener.hpp"

#include <doctest.h>

#include <cmath>

using namespace capinf;

namespace {

CapacityEstimate estimate(double value, double halfwidth = 0.0) {
  CapacityEstimate e;
  e.value = value;
  e.ci_low = std::max(0.0, value - halfwidth);
  e.ci_high = value + halfwidth;
  e.method = halfwidth == 0.0 ? CapacityMethod::Analytic : CapacityMethod::HittingMc;
  return e;
}

std::vector<SeriesTerm> terms_of(const std::vector<double>& values, int n_start = 1,
                                 double halfwidth = 0.0) {
  std::vector<SeriesTerm> out;
  for (size_t i = 0; i < values.size(); ++i) {
    SeriesTerm t;
    t.index = n_start + static_cast<int>(i);
    t.value = values[i];
    t.ci = {std::max(0.0, values[i] - halfwidth), values[i] + halfwidth};
    out.push_back(t);
  }
  return out;
}

}  // namespace

TEST_CASE("series terms and partial sums") {
  // Gamma_n = 2^n in N=3 gives unit terms and S_m = m
  std::vector<CapacityEstimate> gammas;
  for (int n = 1; n <= 6; ++n) gammas.push_back(estimate(std::pow(2.0, n)));
  WienerReport r = series_terms(gammas, 1, 3);
  for (size_t i = 0; i < r.terms.size(); ++i) {
    CHECK(r.terms[i].value == doctest::Approx(1.0));
    CHECK(r.partial_sums[i].low == doctest::Approx(static_cast<double>(i + 1)));
  }

  // Gamma_n = 1 gives the geometric tail 2^{-n}
  gammas.assign(8, estimate(1.0));
  r = series_terms(gammas, 1, 3);
  CHECK(r.terms[0].value == doctest::Approx(0.5));
  CHECK(r.terms[7].value == doctest::Approx(std::pow(2.0, -8)));

  // zero capacities stay zero
  gammas.assign(8, estimate(0.0));
  r = series_terms(gammas, 1, 3);
  CHECK(r.partial_sums.back().high == 0.0);

  // confidence widths propagate with the same 2^{-n(N-2)} factor
  gammas.assign(6, estimate(1.0, 0.25));
  r = series_terms(gammas, 1, 4);
  CHECK(r.terms[0].ci.width() == doctest::Approx(0.5 * std::pow(4.0, -1)));

  CHECK_THROWS_AS(series_terms({estimate(-0.5)}, 1, 3), ValidationError);
}

TEST_CASE("classifier on canonical tails") {
  ClassifierConfig cfg;

  CHECK(classify(terms_of({1, 1, 1, 1, 1, 1}), cfg) == Verdict::DivergesRegular);

  std::vector<double> geometric;
  for (int n = 1; n <= 10; ++n) geometric.push_back(std::pow(2.0, -n));
  CHECK(classify(terms_of(geometric), cfg) == Verdict::ConvergesIrregular);

  std::vector<double> harmonic;
  for (int n = 1; n <= 12; ++n) harmonic.push_back(1.0 / n);
  CHECK(classify(terms_of(harmonic), cfg) == Verdict::DivergesRegular);

  std::vector<double> zeros(8, 0.0);
  CHECK(classify(terms_of(zeros), cfg) == Verdict::ConvergesIrregular);

  // terms buried under their own confidence width classify as convergent
  std::vector<SeriesTerm> noisy = terms_of(std::vector<double>(8, 0.02), 2, 0.005);
  TailDiagnostics diag;
  CHECK(classify(noisy, cfg, &diag) == Verdict::ConvergesIrregular);
  CHECK(diag.rule == "below_noise");

  CHECK_THROWS_AS(classify(terms_of({1, 1, 1}), cfg), InsufficientDataError);
}

TEST_CASE("verdict invariant under finite prefix deletion") {
  ClassifierConfig cfg;
  std::vector<double> values;
  for (int n = 2; n <= 14; ++n) values.push_back(0.4 / n);
  const Verdict full = classify(terms_of(values, 2), cfg);
  std::vector<double> tail(values.begin() + 4, values.end());
  CHECK(classify(terms_of(tail, 6), cfg) == full);

  std::vector<double> geo;
  for (int n = 2; n <= 14; ++n) geo.push_back(std::pow(2.0, -0.5 * n));
  CHECK(classify(terms_of(geo, 2), cfg) ==
        classify(terms_of({geo.begin() + 4, geo.end()}, 6), cfg));
}

TEST_CASE("verdict invariant under bounded constant rescaling") {
  // operator comparability rescales all capacities by a constant in
  // [lambda^-2, lambda^2]; the growth class cannot change
  ClassifierConfig cfg;
  const double lambda = 4.0;
  for (double factor : {1.0 / (lambda * lambda), 0.3, 1.0, 3.7, lambda * lambda}) {
    std::vector<double> harmonic, geo, flat;
    for (int n = 2; n <= 12; ++n) {
      harmonic.push_back(factor * 0.4 / n);
      geo.push_back(factor * std::pow(2.0, -n));
      flat.push_back(factor * 0.8);
    }
    CHECK(classify(terms_of(harmonic, 2), cfg) == Verdict::DivergesRegular);
    CHECK(classify(terms_of(geo, 2), cfg) == Verdict::ConvergesIrregular);
    CHECK(classify(terms_of(flat, 2), cfg) == Verdict::DivergesRegular);
  }
}

TEST_CASE("lambda form terms") {
  std::vector<CapacityEstimate> zeros(6, estimate(0.0));
  auto t0 = lambda_form_terms(zeros, 1, 4.0);
  CHECK(classify(t0, ClassifierConfig{}) == Verdict::ConvergesIrregular);

  std::vector<CapacityEstimate> growing;
  for (int n = 1; n <= 6; ++n) growing.push_back(estimate(std::pow(4.0, n)));
  auto t1 = lambda_form_terms(growing, 1, 4.0);
  for (const auto& t : t1) CHECK(t.value == doctest::Approx(1.0));
  CHECK(classify(t1, ClassifierConfig{}) == Verdict::DivergesRegular);

  CHECK_THROWS_AS(lambda_form_terms(growing, 1, 0.5), ParameterError);
}

TEST_CASE("integral form") {
  ClassifierConfig cfg;
  std::vector<double> rhos;
  std::vector<CapacityEstimate> ones, linear, zeros;
  for (int k = 0; k <= 10; ++k) {
    const double rho = std::pow(2.0, k);
    rhos.push_back(rho);
    ones.push_back(estimate(1.0));
    linear.push_back(estimate(rho));
    zeros.push_back(estimate(0.0));
  }

  // c = 1: integrand rho^{-2}, convergent
  IntegralForm bounded = integral_form(rhos, ones, 3, cfg);
  CHECK(bounded.verdict == Verdict::ConvergesIrregular);

  // c = rho: integrand 1/rho, every octave contributes 3/4 by trapezoid
  IntegralForm cylinder_like = integral_form(rhos, linear, 3, cfg);
  CHECK(cylinder_like.verdict == Verdict::DivergesRegular);
  for (const auto& inc : cylinder_like.increments)
    CHECK(inc.value == doctest::Approx(0.75).epsilon(0.01));

  IntegralForm empty = integral_form(rhos, zeros, 3, cfg);
  CHECK(empty.verdict == Verdict::ConvergesIrregular);
  CHECK(empty.partial_integrals.back().high == 0.0);

  // capacity must be nondecreasing in rho
  std::vector<CapacityEstimate> broken = ones;
  broken[5] = estimate(2.0);
  CHECK_THROWS_AS(integral_form(rhos, broken, 3, cfg), ValidationError);
}
