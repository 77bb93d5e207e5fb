#pragma once

#include "capinf/capacity.hpp"
#include "capinf/common.hpp"

#include <string>
#include <vector>

namespace capinf {

enum class Verdict { DivergesRegular, ConvergesIrregular, Inconclusive };

std::string to_string(Verdict verdict);

struct SeriesTerm {
  int index = 0;       // shell / level / interval index n
  double value = 0.0;  // term u_n >= 0
  Interval ci;
};

/// A finite computation cannot decide convergence of a series; the classifier
/// is an explicit tail-model fit with an Inconclusive escape hatch. Classes:
///   - every term statistically indistinguishable from zero (below
///     max(eps0_floor, noise_mult * its own CI width)), or a hard-zero tail:
///     the series is summable at the achievable resolution
///     -> ConvergesIrregular;
///   - a geometric fit with ratio <= 1 - theta -> ConvergesIrregular;
///   - terms bounded below by the positive floor eps0 = max(eps0_floor,
///     10 * max CI width), or a power-law fit with exponent >= -1 - power_tol
///     (decay no faster than c/n) -> DivergesRegular;
///   - otherwise Inconclusive.
/// Fits are CI-weighted least squares on log terms; a fit only counts when
/// its weighted log-RMS residual stays below fit_accept.
struct ClassifierConfig {
  double theta = 0.2;
  double power_tol = 0.35;
  double eps0_floor = 0.0;
  double noise_mult = 4.0;
  double fit_accept = 0.6;
  int min_terms = 6;
};

struct TailDiagnostics {
  std::string rule = "none";  // below_noise | vanishing_tail | geometric | floor | power | none
  double eps0 = 0.0;
  double geometric_ratio = 0.0;
  double geometric_rms = 0.0;
  double power_exponent = 0.0;
  double power_rms = 0.0;
  int fit_points = 0;
};

struct WienerReport {
  int dimension = 3;
  std::vector<SeriesTerm> terms;
  std::vector<Interval> partial_sums;
  Verdict verdict = Verdict::Inconclusive;
  TailDiagnostics diagnostics;
};

/// Terms u_n = 2^{-n(N-2)} Gamma_n with interval arithmetic on the capacity
/// confidence bounds, plus running partial sums. Does not classify.
WienerReport series_terms(const std::vector<CapacityEstimate>& gammas, int n_start,
                          int dimension);

Verdict classify(const std::vector<SeriesTerm>& terms, const ClassifierConfig& config,
                 TailDiagnostics* diagnostics = nullptr);

/// Classifies report.terms and fills verdict + diagnostics.
Verdict classify(WienerReport& report, const ClassifierConfig& config = {});

/// Terms lambda^{-n} gamma_n of the fundamental-solution-level form of the
/// series; gamma_n come from lambda_shell_capacities.
std::vector<SeriesTerm> lambda_form_terms(const std::vector<CapacityEstimate>& gammas,
                                          int n_start, double lambda);

struct IntegralForm {
  std::vector<double> rhos;
  std::vector<SeriesTerm> increments;      // trapezoidal integral over [rho_k, rho_{k+1}]
  std::vector<Interval> partial_integrals;
  Verdict verdict = Verdict::Inconclusive;
  TailDiagnostics diagnostics;
};

/// Integral test: increments of \int c(rho) rho^{1-N} drho on the given
/// (geometrically spaced) radii, fed to the same tail classifier. Throws
/// ValidationError when the cumulative capacities decrease beyond their
/// confidence intervals.
IntegralForm integral_form(const std::vector<double>& rhos,
                           const std::vector<CapacityEstimate>& cumulative, int dimension,
                           const ClassifierConfig& config = {});

}  // namespace capinf
