#include "capinf/wos.hpp"

#include "capinf/rng.hpp"
#include "capinf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace capinf {

namespace {

constexpr long long kBlockSize = 4096;
constexpr double kTouchSkipFraction = 0.05;

double absorb_tolerance(const WosParams& p, const SetSpec& set, double radius) {
  return std::min(p.eps_shell * std::max(1.0, radius), 0.5 * set.thickness);
}

struct WalkResult {
  PathOutcome outcome = PathOutcome::StepLimited;
  long long steps = 0;
  double max_touch_radius = 0.0;
};

WalkResult run_path(const SetSpec& set, Vector& x, double escape_radius, const WosParams& p,
                    bool continue_after_touch, RandomEngine& eng, Vector& dir) {
  WalkResult res;
  const double eps_outer = p.eps_shell * escape_radius;
  while (res.steps < p.max_steps) {
    const double r = x.norm();
    if (r >= escape_radius - eps_outer) {
      res.outcome = PathOutcome::Escaped;
      return res;
    }
    const double d = set.distance_lb(x);
    double jump;
    if (d <= absorb_tolerance(p, set, r)) {
      if (!continue_after_touch) {
        res.outcome = PathOutcome::Absorbed;
        return res;
      }
      res.max_touch_radius = std::max(res.max_touch_radius, r);
      jump = kTouchSkipFraction * std::max(1.0, r);
    } else {
      jump = std::min(d, escape_radius - r);
    }
    sample_unit_direction(eng, dir);
    x += jump * dir;
    ++res.steps;
  }
  return res;
}

struct BlockTotals {
  long long absorbed = 0;
  long long escaped = 0;
  long long step_limited = 0;
  std::vector<long long> touch_counts;  // per recurrence threshold
};

struct RunTotals {
  long long absorbed = 0;
  long long escaped = 0;
  long long step_limited = 0;
  std::vector<long long> touch_counts;
};

/// Runs n_paths independent paths partitioned into fixed-size blocks that are
/// distributed round-robin over the workers; block totals are merged in block
/// order, so the result does not depend on the worker count.
template <typename PathFn>
RunTotals run_blocks(long long n_paths, int workers, size_t n_thresholds, PathFn&& path_fn) {
  const long long n_blocks = (n_paths + kBlockSize - 1) / kBlockSize;
  std::vector<BlockTotals> blocks(static_cast<size_t>(n_blocks));
  int n_workers = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
  if (n_workers < 1) n_workers = 1;
  n_workers = static_cast<int>(std::min<long long>(n_workers, n_blocks));

  auto work = [&](int worker) {
    for (long long b = worker; b < n_blocks; b += n_workers) {
      BlockTotals& tot = blocks[static_cast<size_t>(b)];
      tot.touch_counts.assign(n_thresholds, 0);
      const long long begin = b * kBlockSize;
      const long long end = std::min(n_paths, begin + kBlockSize);
      for (long long i = begin; i < end; ++i) path_fn(i, tot);
    }
  };
  if (n_workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }

  RunTotals totals;
  totals.touch_counts.assign(n_thresholds, 0);
  for (const auto& b : blocks) {
    totals.absorbed += b.absorbed;
    totals.escaped += b.escaped;
    totals.step_limited += b.step_limited;
    for (size_t k = 0; k < n_thresholds; ++k) totals.touch_counts[k] += b.touch_counts[k];
  }
  return totals;
}

void note_step_limit(EscapeEstimate& est, long long step_limited, long long n_paths) {
  est.step_limited_fraction =
      n_paths > 0 ? static_cast<double>(step_limited) / static_cast<double>(n_paths) : 0.0;
  if (est.step_limited_fraction > 0.10)
    throw NumericError("walk-on-spheres: more than 10% of paths hit the step limit",
                       est.step_limited_fraction);
  if (est.step_limited_fraction > 0.01)
    est.warning = "more than 1% of paths hit the step limit";
}

/// One run at a fixed escape radius. `hit_mode` counts absorptions instead of
/// escapes; `start_on_sphere` samples the start uniformly on |x| = start_radius.
EscapeEstimate single_run(const SetSpec& set, const Vector& x0, double start_radius,
                          bool start_on_sphere, bool hit_mode, double escape_radius,
                          const WosParams& params, std::uint64_t stage,
                          std::vector<PathRecord>* dump) {
  EscapeEstimate est;
  est.n_paths = params.n_paths;
  if (dump) dump->resize(static_cast<size_t>(params.n_paths));

  const std::uint64_t base_seed = stream_seed(params.seed, 0xabcd0000ULL + stage);
  RunTotals totals = run_blocks(
      params.n_paths, params.workers, 0, [&](long long i, BlockTotals& tot) {
        RandomEngine eng = make_engine(base_seed, static_cast<std::uint64_t>(i));
        Vector x(set.dimension), dir(set.dimension);
        if (start_on_sphere) {
          sample_unit_direction(eng, x);
          x *= start_radius;
        } else {
          x = x0;
        }
        WalkResult r = run_path(set, x, escape_radius, params, false, eng, dir);
        switch (r.outcome) {
          case PathOutcome::Absorbed: ++tot.absorbed; break;
          case PathOutcome::Escaped: ++tot.escaped; break;
          case PathOutcome::StepLimited: ++tot.step_limited; break;
        }
        if (dump) (*dump)[static_cast<size_t>(i)] = {r.outcome, r.steps, r.max_touch_radius};
      });

  note_step_limit(est, totals.step_limited, params.n_paths);
  const long long successes = hit_mode ? totals.absorbed : totals.escaped;
  est.p = static_cast<double>(successes) / static_cast<double>(params.n_paths);
  const Interval ci = wilson_interval(successes, params.n_paths);
  est.ci_low = ci.low;
  est.ci_high = ci.high;
  est.raw = {{escape_radius, est.p}};
  return est;
}

EscapeEstimate extrapolate_pair(const EscapeEstimate& at_r, const EscapeEstimate& at_2r,
                                int dimension) {
  // p(R) = p_inf + a R^{2-N}: eliminate the leading term from the pair.
  const double f = std::pow(2.0, dimension - 2);
  const double c2 = f / (f - 1.0);
  const double c1 = 1.0 / (f - 1.0);
  EscapeEstimate est;
  est.n_paths = at_r.n_paths + at_2r.n_paths;
  est.extrapolated = true;
  est.p = std::clamp(c2 * at_2r.p - c1 * at_r.p, 0.0, 1.0);
  const double hw1 = 0.5 * (at_r.ci_high - at_r.ci_low);
  const double hw2 = 0.5 * (at_2r.ci_high - at_2r.ci_low);
  const double hw = std::sqrt(c2 * c2 * hw2 * hw2 + c1 * c1 * hw1 * hw1);
  est.ci_low = std::max(0.0, est.p - hw);
  est.ci_high = std::min(1.0, est.p + hw);
  est.raw = {at_r.raw.front(), at_2r.raw.front()};
  est.step_limited_fraction = std::max(at_r.step_limited_fraction, at_2r.step_limited_fraction);
  est.warning = !at_r.warning.empty() ? at_r.warning : at_2r.warning;
  return est;
}

}  // namespace

EscapeEstimate wos_escape(const SetSpec& set, const Vector& x, const WosParams& params,
                          std::vector<PathRecord>* dump) {
  if (x.size() != set.dimension) throw ParameterError("wos_escape: point dimension mismatch");
  if (params.n_paths < 1) throw ParameterError("wos_escape: n_paths must be >= 1");
  if (set.contains(x)) throw DomainError("wos_escape: start point lies inside the set");
  if (params.escape_radius <= x.norm())
    throw ParameterError("wos_escape: escape radius must exceed |x|");

  if (set.empty()) {
    EscapeEstimate est;
    est.p = est.ci_low = est.ci_high = 1.0;
    est.n_paths = params.n_paths;
    est.raw = {{params.escape_radius, 1.0}};
    return est;
  }
  if (set.distance_lb(x) <= absorb_tolerance(params, set, x.norm())) {
    EscapeEstimate est;
    est.p = est.ci_low = est.ci_high = 0.0;
    est.n_paths = params.n_paths;
    est.raw = {{params.escape_radius, 0.0}};
    return est;
  }

  EscapeEstimate base =
      single_run(set, x, 0.0, false, false, params.escape_radius, params, 1, dump);
  if (!params.extrapolate) return base;
  EscapeEstimate far =
      single_run(set, x, 0.0, false, false, 2.0 * params.escape_radius, params, 2, nullptr);
  return extrapolate_pair(base, far, set.dimension);
}

EscapeEstimate wos_hit_probability(const SetSpec& region, double rho0, const WosParams& params,
                                   std::vector<PathRecord>* dump) {
  if (params.n_paths < 1) throw ParameterError("wos_hit_probability: n_paths must be >= 1");
  if (!region.bounded())
    throw ParameterError("wos_hit_probability: region must be bounded");
  if (region.empty()) {
    EscapeEstimate est;
    est.p = est.ci_low = est.ci_high = 0.0;
    est.n_paths = params.n_paths;
    est.raw = {{params.escape_radius, 0.0}};
    return est;
  }
  if (rho0 < 4.0 * *region.outer_radius)
    throw ParameterError("wos_hit_probability: rho0 must be at least 4x the region radius");
  if (params.escape_radius <= rho0)
    throw ParameterError("wos_hit_probability: escape radius must exceed rho0");

  EscapeEstimate base =
      single_run(region, Vector(), rho0, true, true, params.escape_radius, params, 3, dump);
  if (!params.extrapolate) return base;
  EscapeEstimate far =
      single_run(region, Vector(), rho0, true, true, 2.0 * params.escape_radius, params, 4, nullptr);
  return extrapolate_pair(base, far, region.dimension);
}

RecurrenceResult recurrence_experiment(const SetSpec& set, const Vector& x0,
                                       const std::vector<int>& thresholds,
                                       const WosParams& params, std::vector<PathRecord>* dump) {
  if (thresholds.empty()) throw ParameterError("recurrence_experiment: no thresholds");
  if (!std::is_sorted(thresholds.begin(), thresholds.end()))
    throw ParameterError("recurrence_experiment: thresholds must be increasing");
  if (set.contains(x0)) throw DomainError("recurrence_experiment: start point inside the set");

  RecurrenceResult result;
  result.thresholds = thresholds;
  result.n_paths = params.n_paths;
  const int m_max = thresholds.back();
  result.escape_radius =
      params.escape_radius > 0 ? params.escape_radius : std::pow(2.0, m_max + 2);
  if (result.escape_radius <= x0.norm())
    throw ParameterError("recurrence_experiment: escape radius must exceed |x0|");

  std::vector<double> cut(thresholds.size());
  for (size_t k = 0; k < thresholds.size(); ++k) cut[k] = std::pow(2.0, thresholds[k]);
  if (dump) dump->resize(static_cast<size_t>(params.n_paths));

  const std::uint64_t base_seed = stream_seed(params.seed, 0x0ecc0eccULL);
  RunTotals totals = run_blocks(
      params.n_paths, params.workers, thresholds.size(), [&](long long i, BlockTotals& tot) {
        RandomEngine eng = make_engine(base_seed, static_cast<std::uint64_t>(i));
        Vector x = x0, dir(set.dimension);
        WalkResult r = run_path(set, x, result.escape_radius, params, true, eng, dir);
        if (r.outcome == PathOutcome::StepLimited) ++tot.step_limited;
        for (size_t k = 0; k < cut.size(); ++k)
          if (r.max_touch_radius > cut[k]) ++tot.touch_counts[k];
        if (dump) (*dump)[static_cast<size_t>(i)] = {r.outcome, r.steps, r.max_touch_radius};
      });

  result.step_limited_fraction =
      static_cast<double>(totals.step_limited) / static_cast<double>(params.n_paths);
  if (result.step_limited_fraction > 0.10)
    throw NumericError("recurrence_experiment: more than 10% of paths hit the step limit",
                       result.step_limited_fraction);
  for (size_t k = 0; k < thresholds.size(); ++k) {
    result.fraction.push_back(static_cast<double>(totals.touch_counts[k]) /
                              static_cast<double>(params.n_paths));
    result.ci.push_back(wilson_interval(totals.touch_counts[k], params.n_paths));
  }
  return result;
}

}  // namespace capinf
