#pragma once

#include "capinf/common.hpp"
#include "capinf/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace capinf {

/// Walk-on-spheres controls. Paths jump to uniform points on spheres of
/// radius distance_lb(x) (capped by the distance to the escape sphere), are
/// absorbed within eps_shell * max(1, |x|) of the obstacle -- never more than
/// half the obstacle's cross-sectional thickness -- and terminate once
/// |x| reaches escape_radius.
struct WosParams {
  double eps_shell = 1e-3;
  double escape_radius = 0.0;
  long long max_steps = 200000;
  long long n_paths = 100000;
  std::uint64_t seed = 0;
  int workers = 0;       // 0: hardware concurrency
  bool extrapolate = true;  // second run at 2 * escape_radius, Richardson in R^{2-N}
};

struct EscapeEstimate {
  double p = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  /// (radius, raw estimate) pairs behind an extrapolated value.
  std::vector<std::pair<double, double>> raw;
  bool extrapolated = false;
  long long n_paths = 0;
  double step_limited_fraction = 0.0;
  std::string warning;
};

enum class PathOutcome : std::uint8_t { Absorbed = 0, Escaped = 1, StepLimited = 2 };

struct PathRecord {
  PathOutcome outcome;
  long long steps;
  double max_touch_radius;  // 0 when the path never touched the set
};

/// Probability that Brownian motion from x reaches |y| = escape_radius before
/// hitting the set; with extrapolation this approximates the harmonic measure
/// of infinity for the Laplacian. Throws DomainError when x is inside the set.
EscapeEstimate wos_escape(const SetSpec& set, const Vector& x, const WosParams& params,
                          std::vector<PathRecord>* dump = nullptr);

/// Probability that Brownian motion from a uniform point on |x| = rho0 hits
/// the (bounded) region before reaching the escape radius. No extrapolation
/// is applied here; capacity estimation corrects for the finite horizon.
EscapeEstimate wos_hit_probability(const SetSpec& region, double rho0, const WosParams& params,
                                   std::vector<PathRecord>* dump = nullptr);

struct RecurrenceResult {
  std::vector<int> thresholds;                  // exponents m
  std::vector<double> fraction;                 // paths touching the set beyond 2^m
  std::vector<Interval> ci;
  long long n_paths = 0;
  double escape_radius = 0.0;
  double step_limited_fraction = 0.0;
};

/// Empirical surrogate of the zero-one clustering law: the fraction of paths
/// from x0 that touch the set at some |x| > 2^m before escaping past
/// 2^{max m + 2}. Paths continue after a touch (the touch radius is recorded
/// and the path restarts a fixed fraction of |x| away), so the fractions are
/// nonincreasing in m by construction. A finite escape radius truncates the
/// infinite-time event; the trend, not any single value, is the signal.
RecurrenceResult recurrence_experiment(const SetSpec& set, const Vector& x0,
                                       const std::vector<int>& thresholds,
                                       const WosParams& params,
                                       std::vector<PathRecord>* dump = nullptr);

}  // namespace capinf
