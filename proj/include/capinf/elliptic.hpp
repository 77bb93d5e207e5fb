#pragma once

#include "capinf/common.hpp"
#include "capinf/field.hpp"
#include "capinf/geometry.hpp"
#include "capinf/grid.hpp"

#include <functional>
#include <vector>

namespace capinf {

/// Dirichlet values on obstacle cells and outer-boundary cells, evaluated at
/// cell centers.
struct BoundaryData {
  std::function<double(const Vector&)> obstacle;
  std::function<double(const Vector&)> outer;
};

inline BoundaryData constant_bc(double obstacle_value, double outer_value) {
  return {[obstacle_value](const Vector&) { return obstacle_value; },
          [outer_value](const Vector&) { return outer_value; }};
}

struct SolveParams {
  double rel_tol = 1e-10;
  long long max_iterations = 0;  // 0: picked from the grid size
};

struct SolveStats {
  long long iterations = 0;
  double relative_residual = 0.0;
};

/// Flux-conservative finite-volume solve of -(a u_{x_i})_{x_i} = 0 with the
/// 2N+1-point stencil; face coefficients are distance-weighted harmonic
/// averages of the cell-centered coefficients, so the system is a symmetric
/// M-matrix and the discrete solution obeys the maximum principle. Solved by
/// conjugate gradients with an SSOR preconditioner (sequential sweeps, fully
/// deterministic).
GridFunction solve_dirichlet(const GridPtr& grid, const CoefficientField& field,
                             const BoundaryData& bc, const SolveParams& params = {},
                             SolveStats* stats = nullptr);

/// Same discretization with a point source: -(a u_{x_i})_{x_i} = strength * delta_y
/// and zero Dirichlet data. With strength = kernel_energy_constant(N) and the
/// identity field the solution approximates |x - y|^{2-N} away from y.
GridFunction solve_point_source(const GridPtr& grid, const CoefficientField& field,
                                const Vector& source, double strength,
                                const SolveParams& params = {}, SolveStats* stats = nullptr);

/// Discrete Dirichlet energy sum_faces T_f (u_i - u_j)^2 of a grid function.
double dirichlet_energy(const GridFunction& u, const CoefficientField& field);

struct CapacitaryResult {
  GridFunction potential;   // 1 on obstacle cells, 0 on the outer boundary
  double energy = 0.0;
  double capacity_raw = 0.0;  // energy / kernel_energy_constant: condenser value
  double capacity = 0.0;      // corrected for the finite outer radius
  long long obstacle_cells = 0;
};

/// Capacitary potential of the grid's obstacle cells against the outer
/// boundary. The condenser value overshoots the whole-space capacity because
/// the outer sphere is finite; the correction 1/cap = 1/cap_cond + R^{2-N}
/// (exact for concentric spheres) removes the leading truncation error.
CapacitaryResult capacitary_potential(const GridPtr& grid, const CoefficientField& field,
                                      const SolveParams& params = {});

GridFunction discrete_green(const GridPtr& grid, const CoefficientField& field,
                            const Vector& source, const SolveParams& params = {});

struct MeasurePdeResult {
  std::vector<double> radii;
  std::vector<double> values;  // u_R(x), nonincreasing in R
  double extrapolated = 0.0;
  double ci_halfwidth = 0.0;  // spread between the extrapolated and last raw value
  double h = 0.0;
  long long finest_cells = 0;
};

struct PdeMeasureOptions {
  double h = 0.5;
  /// When positive, axes are uniform at h only inside |coordinate| <=
  /// fine_radius and stretch geometrically beyond; all truncation radii share
  /// one master grid, so the solves stay exactly nested.
  double fine_radius = 0.0;
  double growth = 1.3;
};

/// Harmonic measure of infinity via truncated solves: boundary value 1 on the
/// sphere |y| = R and 0 on obstacle cells, evaluated at x for each R. The
/// sequence is nonincreasing by the maximum principle (asserted); the final
/// estimate attaches a Richardson tail extrapolation in R^{2-N}.
MeasurePdeResult harmonic_measure_pde(const SetSpec& set, const Vector& x,
                                      const std::vector<double>& radii,
                                      const CoefficientField& field,
                                      const PdeMeasureOptions& options,
                                      const SolveParams& params = {});

inline MeasurePdeResult harmonic_measure_pde(const SetSpec& set, const Vector& x,
                                             const std::vector<double>& radii,
                                             const CoefficientField& field, double h,
                                             const SolveParams& params = {}) {
  PdeMeasureOptions options;
  options.h = h;
  return harmonic_measure_pde(set, x, radii, field, options, params);
}

}  // namespace capinf
