#include "capinf/capacity.hpp"

#include "capinf/rng.hpp"
#include "capinf/wos.hpp"

#include <algorithm>
#include <cmath>

namespace capinf {

namespace {

CapacityEstimate zero_estimate(CapacityMethod method) {
  CapacityEstimate est;
  est.method = method;
  return est;
}

/// Inversion of the spherical-condenser hitting law; increasing in p.
double invert_hitting(double p, double rho0, double escape_radius, int n) {
  if (p <= 0.0) return 0.0;
  const double a = std::pow(rho0, 2 - n);
  const double b = std::pow(escape_radius, 2 - n);
  return p / (a - b + p * b);
}

CapacityEstimate hitting_mc_single(const SetSpec& region, double rho0,
                                   const McCapacityParams& params, std::uint64_t stage) {
  WosParams wp;
  wp.eps_shell = params.eps_shell;
  wp.escape_radius = params.escape_factor * rho0;
  wp.max_steps = params.max_steps;
  wp.n_paths = params.n_paths;
  wp.seed = stream_seed(params.seed, stage);
  wp.workers = params.workers;
  wp.extrapolate = false;
  EscapeEstimate hit = wos_hit_probability(region, rho0, wp);

  CapacityEstimate est;
  est.method = CapacityMethod::HittingMc;
  est.samples_or_cells = params.n_paths;
  est.seed = params.seed;
  const int n = region.dimension;
  est.value = invert_hitting(hit.p, rho0, wp.escape_radius, n);
  est.ci_low = invert_hitting(hit.ci_low, rho0, wp.escape_radius, n);
  est.ci_high = invert_hitting(hit.ci_high, rho0, wp.escape_radius, n);
  est.metadata["rho0"] = rho0;
  est.metadata["escape_radius"] = wp.escape_radius;
  est.metadata["hit_probability"] = hit.p;
  est.metadata["bias_scale_rE_over_rho0"] = *region.outer_radius / rho0;
  if (!hit.warning.empty()) est.note = hit.warning;
  return est;
}

void scale_estimate(CapacityEstimate& est, double factor) {
  est.value *= factor;
  est.ci_low *= factor;
  est.ci_high *= factor;
}

/// Transverse feature size of the canonical families, used to grade shell
/// grids. Returns +inf for fat shapes.
double transverse_feature(const SetSpec& set, double shell_outer) {
  switch (set.kind) {
    case ShapeKind::AxisRay:
      return set.params.size() > 1 ? set.params[1] : 1e-3;
    case ShapeKind::SolidCylinder:
      return set.params[0];
    case ShapeKind::PowerThorn:
      // width at the inner edge of the shell
      return std::pow(0.5 * shell_outer, set.params[0]);
    case ShapeKind::DyadicBallUnion: {
      const double growth = set.params[0];
      const double scale = set.params[1];
      const double k = std::log2(std::max(2.0, shell_outer));
      return scale * std::pow(2.0, growth * (k - 1));
    }
    default:
      return kInfinity;
  }
}

std::vector<AxisGrading> shell_grading(int dimension, double rescaled_feature, double outer,
                                       double h_base, double h_floor, bool axial_fine) {
  const double f = std::max(rescaled_feature, 1e-12);
  const double h_fine = std::clamp(f / 3.0, h_floor, h_base);
  const double band = std::max(2.0 * f, 4.0 * h_fine);
  const double max_step = 0.2;  // bounds the anisotropy the solver has to take
  std::vector<AxisGrading> axes(dimension);
  // axial direction: the rescaled shell piece lives in x_1 in [~0.3, 1.05];
  // compact pieces (ball unions) need the fine spacing axially as well,
  // elongated ones only transversally
  const double h_axial = axial_fine ? h_fine : std::clamp(f / 3.0, 1.0 / 48, 1.0 / 16);
  axes[0] = {0.3, 1.1, h_axial, -outer, outer, 1.35, max_step};
  for (int d = 1; d < dimension; ++d)
    axes[d] = {-band, band, h_fine, -outer, outer, 1.35, max_step};
  return axes;
}

CapacityEstimate shell_estimate(const SetSpec& set, const SetSpec& region, double r_outer,
                                const ShellCapacityParams& params,
                                const CoefficientField* field, std::uint64_t stage) {
  if (region.empty()) return zero_estimate(params.method == CapacityMethod::Variational
                                               ? CapacityMethod::Variational
                                               : CapacityMethod::Analytic);
  if (params.method == CapacityMethod::HittingMc) {
    McCapacityParams mc = params.mc;
    mc.seed = stream_seed(params.mc.seed, stage);
    return capacity_hitting_mc(region, params.rho0_factor * r_outer, mc);
  }
  if (params.method != CapacityMethod::Variational)
    throw ParameterError("shell_capacities: method must be hitting_mc or variational");
  if (!field) throw ParameterError("shell_capacities: variational route needs a field");

  // Solve the shell rescaled to unit size; capacities scale as r^{N-2}.
  const double scale = r_outer;
  SetSpec unit_region = rescale(region, scale);
  CoefficientField unit_field = rescale(*field, scale);
  VariationalParams vp = params.variational;
  const double feature = transverse_feature(set, r_outer) / scale;
  if (feature < 0.15) {
    vp.axes = shell_grading(set.dimension, feature, vp.outer_factor, vp.h, vp.h_floor,
                            set.kind == ShapeKind::DyadicBallUnion);
  } else {
    // fat pieces need no finer spacing than a fraction of the feature size
    vp.h = std::max(vp.h, std::min(feature / 3.0, 0.125));
  }
  CapacityEstimate est = capacity_variational(unit_region, unit_field, vp);
  scale_estimate(est, std::pow(scale, set.dimension - 2));
  est.metadata["rescale"] = scale;
  return est;
}

}  // namespace

std::string to_string(CapacityMethod method) {
  switch (method) {
    case CapacityMethod::Analytic: return "analytic";
    case CapacityMethod::HittingMc: return "hitting_mc";
    case CapacityMethod::Variational: return "variational";
  }
  return "unknown";
}

double DiscreteMeasure::total_mass() const {
  double m = 0.0;
  for (double w : weights) m += w;
  return m;
}

CapacityEstimate ball_capacity(double radius, int dimension) {
  require_dimension(dimension);
  if (radius <= 0.0) throw ParameterError("ball_capacity: radius must be positive");
  CapacityEstimate est;
  est.method = CapacityMethod::Analytic;
  est.value = est.ci_low = est.ci_high = std::pow(radius, dimension - 2);
  return est;
}

double newtonian_potential(const DiscreteMeasure& measure, const Vector& x) {
  if (measure.points.size() != measure.weights.size())
    throw ParameterError("newtonian_potential: points/weights size mismatch");
  const int n = static_cast<int>(x.size());
  require_dimension(n);
  double sum = 0.0;
  for (size_t i = 0; i < measure.points.size(); ++i) {
    if (measure.weights[i] < 0.0)
      throw ValidationError("newtonian_potential: weights must be nonnegative");
    const double r = (x - measure.points[i]).norm();
    if (r == 0.0) return kInfinity;
    sum += measure.weights[i] * std::pow(r, 2 - n);
  }
  return sum;
}

CapacityEstimate capacity_hitting_mc(const SetSpec& region, double rho0,
                                     const McCapacityParams& params) {
  if (region.empty()) return zero_estimate(CapacityMethod::HittingMc);
  if (!region.bounded())
    throw ParameterError("capacity_hitting_mc: region must be bounded");
  if (rho0 < 4.0 * *region.outer_radius)
    throw ParameterError("capacity_hitting_mc: rho0 must be at least 4x the region radius");

  CapacityEstimate near = hitting_mc_single(region, rho0, params, 11);
  if (!params.extrapolate_rho) return near;
  CapacityEstimate far = hitting_mc_single(region, 2.0 * rho0, params, 12);

  CapacityEstimate est;
  est.method = CapacityMethod::HittingMc;
  est.samples_or_cells = 2 * params.n_paths;
  est.seed = params.seed;
  est.value = std::max(0.0, 2.0 * far.value - near.value);
  const double hw_near = 0.5 * (near.ci_high - near.ci_low);
  const double hw_far = 0.5 * (far.ci_high - far.ci_low);
  const double hw = std::sqrt(4.0 * hw_far * hw_far + hw_near * hw_near);
  est.ci_low = std::max(0.0, est.value - hw);
  est.ci_high = est.value + hw;
  est.metadata = near.metadata;
  est.metadata["raw_rho0"] = near.value;
  est.metadata["raw_2rho0"] = far.value;
  est.note = !near.note.empty() ? near.note : far.note;
  return est;
}

CapacityEstimate capacity_variational(const SetSpec& region, const CoefficientField& field,
                                      const VariationalParams& params) {
  if (region.empty()) return zero_estimate(CapacityMethod::Variational);
  if (!region.bounded())
    throw ParameterError("capacity_variational: region must be bounded");
  if (params.outer_factor < 4.0)
    throw ParameterError("capacity_variational: outer boundary must be >= 4x region radius");
  const double r_outer = *region.outer_radius;
  const double outer_radius = params.outer_factor * r_outer;

  auto solve_at = [&](double h_scale) {
    GridPtr grid;
    if (params.axes.empty()) {
      grid = make_uniform_sphere_grid(region.dimension, outer_radius, params.h * h_scale,
                                      &region);
    } else {
      std::vector<AxisGrading> axes = params.axes;
      for (auto& a : axes) a.h_fine = std::max(a.h_fine * h_scale, 0.25 * params.h_floor);
      grid = make_graded_sphere_grid(region.dimension, axes, outer_radius, &region);
    }
    return capacitary_potential(grid, field, params.solve);
  };

  CapacitaryResult coarse = solve_at(1.0);
  CapacityEstimate est;
  est.method = CapacityMethod::Variational;
  est.metadata["outer_radius"] = outer_radius;
  if (coarse.obstacle_cells == 0) {
    est.note = "geometry below grid resolution";
    est.samples_or_cells = coarse.potential.grid->total_cells;
    return est;
  }
  if (!params.refine) {
    est.value = est.ci_low = est.ci_high = coarse.capacity;
    est.samples_or_cells = coarse.potential.grid->total_cells;
    est.metadata["condenser_value"] = coarse.capacity_raw;
    return est;
  }
  CapacitaryResult fine = solve_at(0.5);
  est.value = fine.capacity;
  // two-grid bracket with a floor: rasterized boundaries converge slowly and
  // not always monotonically, so the plain spread can understate the error
  const double spread =
      std::max(std::abs(fine.capacity - coarse.capacity), 0.05 * fine.capacity);
  est.ci_low = std::max(0.0, fine.capacity - spread);
  est.ci_high = fine.capacity + spread;
  est.samples_or_cells = fine.potential.grid->total_cells;
  est.metadata["condenser_value"] = fine.capacity_raw;
  est.metadata["coarse_value"] = coarse.capacity;
  est.metadata["two_grid_spread"] = std::abs(fine.capacity - coarse.capacity);
  return est;
}

std::vector<CapacityEstimate> shell_capacities(const SetSpec& set, int n_min, int n_max,
                                               const ShellCapacityParams& params,
                                               const CoefficientField* field) {
  if (n_min < 1 || n_max < n_min) throw ParameterError("shell_capacities: need n_max >= n_min >= 1");
  std::vector<CapacityEstimate> result;
  for (int n = n_min; n <= n_max; ++n) {
    ShellRegion region = shell(set, n);
    CapacityEstimate est = shell_estimate(set, region.restricted, region.outer_radius, params,
                                          field, 1000 + static_cast<std::uint64_t>(n));
    est.metadata["shell_index"] = n;
    result.push_back(std::move(est));
  }
  return result;
}

std::vector<CapacityEstimate> lambda_shell_capacities(const SetSpec& set, double lambda,
                                                      int n_min, int n_max,
                                                      const ShellCapacityParams& params,
                                                      const CoefficientField* field) {
  if (lambda <= 1.0) throw ParameterError("lambda_shell_capacities: lambda must exceed 1");
  if (n_min < 1 || n_max < n_min)
    throw ParameterError("lambda_shell_capacities: need n_max >= n_min >= 1");
  std::vector<CapacityEstimate> result;
  const double exponent = 1.0 / (set.dimension - 2);
  for (int n = n_min; n <= n_max; ++n) {
    const double r_lo = std::pow(lambda, (n - 1) * exponent);
    const double r_hi = std::pow(lambda, n * exponent);
    SetSpec region = annulus_restriction(set, r_lo, r_hi);
    CapacityEstimate est =
        shell_estimate(set, region, r_hi, params, field, 2000 + static_cast<std::uint64_t>(n));
    est.metadata["level_index"] = n;
    est.metadata["r_lo"] = r_lo;
    est.metadata["r_hi"] = r_hi;
    result.push_back(std::move(est));
  }
  return result;
}

CapacityEstimate cumulative_capacity(const SetSpec& set, double rho,
                                     const ShellCapacityParams& params,
                                     const CoefficientField* field) {
  if (rho <= 0.0) throw ParameterError("cumulative_capacity: rho must be positive");
  SetSpec region = radial_truncation(set, rho);
  const double r_outer = region.outer_radius.value_or(rho);
  CapacityEstimate est = shell_estimate(set, region, std::max(r_outer, 1e-9), params, field,
                                        3000 + static_cast<std::uint64_t>(std::llround(rho)));
  est.metadata["rho"] = rho;
  return est;
}

}  // namespace capinf
