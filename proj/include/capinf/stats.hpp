#pragma once

#include "capinf/common.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace capinf {

/// Wilson score interval for a binomial proportion at ~95% confidence.
inline Interval wilson_interval(long long successes, long long trials) {
  if (trials <= 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

/// Weighted least-squares line y = intercept + slope * t.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;  // weighted RMS in y-units
  int points = 0;
};

inline LineFit weighted_line_fit(const std::vector<double>& t, const std::vector<double>& y,
                                 const std::vector<double>& w) {
  LineFit fit;
  fit.points = static_cast<int>(t.size());
  if (fit.points < 2) return fit;
  double sw = 0, st = 0, sy = 0, stt = 0, sty = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    sw += w[i];
    st += w[i] * t[i];
    sy += w[i] * y[i];
    stt += w[i] * t[i] * t[i];
    sty += w[i] * t[i] * y[i];
  }
  const double det = sw * stt - st * st;
  if (std::abs(det) < 1e-300 || sw <= 0) return fit;
  fit.slope = (sw * sty - st * sy) / det;
  fit.intercept = (stt * sy - st * sty) / det;
  double ss = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * t[i]);
    ss += w[i] * r * r;
  }
  fit.rms_residual = std::sqrt(ss / sw);
  return fit;
}

/// Richardson extrapolation of a sequence v(R_k) = v_inf + a * R_k^{-q} (+ ...)
/// on geometrically growing R_k. Uses the last three values when available to
/// remove two leading orders, otherwise the last two, otherwise the last value.
inline double richardson_tail(const std::vector<double>& values, double ratio, double q) {
  const size_t m = values.size();
  if (m == 0) return 0.0;
  if (m == 1) return values.back();
  const double r = std::pow(ratio, -q);  // contraction of the leading term per step
  if (m == 2) {
    return (values[m - 1] - r * values[m - 2]) / (1.0 - r);
  }
  // two-stage elimination: remove R^{-q}, then R^{-2q}
  const double r2 = r * r;
  const double e1 = (values[m - 1] - r * values[m - 2]) / (1.0 - r);
  const double e0 = (values[m - 2] - r * values[m - 3]) / (1.0 - r);
  return (e1 - r2 * e0) / (1.0 - r2);
}

}  // namespace capinf
