#include "capinf/elliptic.hpp"

#include "capinf/stats.hpp"

#include <algorithm>
#include <cmath>

namespace capinf {

namespace {

/// Fixed-degree packed form of the interior system. Slot s < N of a row is
/// the minus-side neighbor along axis s (always a smaller unknown index),
/// slot N + s the plus side; -1 marks a Dirichlet or missing neighbor whose
/// transmissibility is folded into the diagonal and right-hand side.
struct Assembly {
  int n_axes = 0;
  long long n_unknowns = 0;
  std::vector<long long> cells;     // unknown -> cell
  std::vector<std::int32_t> slot;   // 2N per unknown, neighbor unknown index
  std::vector<double> coeff;        // 2N per unknown, transmissibility
  Eigen::VectorXd diag;
  Eigen::VectorXd rhs;
};

std::vector<double> field_values(const Grid& g, const CoefficientField& field) {
  std::vector<double> a(static_cast<size_t>(g.total_cells));
  std::vector<long long> idx(g.dimension, 0);
  Vector x(g.dimension);
  for (long long c = 0; c < g.total_cells; ++c) {
    for (int d = 0; d < g.dimension; ++d) x[d] = g.centers[d][idx[d]];
    a[static_cast<size_t>(c)] = field.scalar(x);
    for (int d = 0; d < g.dimension; ++d) {
      if (++idx[d] < g.cells_per_axis[d]) break;
      idx[d] = 0;
    }
  }
  return a;
}

/// Transmissibility of the face between cells i and j along axis d:
/// area / (w_i / 2a_i + w_j / 2a_j).
double transmissibility(const Grid& g, const std::vector<double>& a,
                        const std::vector<long long>& idx, long long ci, long long cj, int d,
                        double area) {
  const double wi = g.widths[d][idx[d]];
  const double wj = g.widths[d][idx[d] + 1];
  const double ai = a[static_cast<size_t>(ci)];
  const double aj = a[static_cast<size_t>(cj)];
  return area / (0.5 * wi / ai + 0.5 * wj / aj);
}

Assembly assemble(const Grid& g, const CoefficientField& field, const BoundaryData& bc) {
  Assembly asmb;
  const int n = g.dimension;
  asmb.n_axes = n;
  const std::vector<double> a = field_values(g, field);

  std::vector<std::int32_t> unknown_of(static_cast<size_t>(g.total_cells), -1);
  asmb.cells.reserve(static_cast<size_t>(g.interior_cells));
  for (long long c = 0; c < g.total_cells; ++c) {
    if (g.klass(c) == CellClass::Interior) {
      unknown_of[static_cast<size_t>(c)] = static_cast<std::int32_t>(asmb.cells.size());
      asmb.cells.push_back(c);
    }
  }
  asmb.n_unknowns = static_cast<long long>(asmb.cells.size());
  if (asmb.n_unknowns == 0) return asmb;

  asmb.slot.assign(static_cast<size_t>(asmb.n_unknowns) * 2 * n, -1);
  asmb.coeff.assign(static_cast<size_t>(asmb.n_unknowns) * 2 * n, 0.0);
  asmb.diag = Eigen::VectorXd::Zero(asmb.n_unknowns);
  asmb.rhs = Eigen::VectorXd::Zero(asmb.n_unknowns);

  std::vector<long long> idx(n), jdx(n);
  Vector y(n);
  for (long long u = 0; u < asmb.n_unknowns; ++u) {
    const long long c = asmb.cells[static_cast<size_t>(u)];
    g.multi_index(c, idx);
    double volume = 1.0;
    for (int d = 0; d < n; ++d) volume *= g.widths[d][idx[d]];
    for (int d = 0; d < n; ++d) {
      const double area = volume / g.widths[d][idx[d]];
      for (int side = 0; side < 2; ++side) {
        const long long j = side == 0 ? idx[d] - 1 : idx[d] + 1;
        if (j < 0 || j >= g.cells_per_axis[d]) continue;
        const long long cj = c + (side == 0 ? -g.strides[d] : g.strides[d]);
        jdx = idx;
        jdx[d] = std::min(idx[d], j);  // lower cell of the face
        const long long lower_cell = side == 0 ? cj : c;
        const long long upper_cell = side == 0 ? c : cj;
        const double t = transmissibility(g, a, jdx, lower_cell, upper_cell, d, area);
        asmb.diag[u] += t;
        const std::int32_t ju = unknown_of[static_cast<size_t>(cj)];
        const size_t s = static_cast<size_t>(u) * 2 * n + static_cast<size_t>(side == 0 ? d : n + d);
        if (ju >= 0) {
          asmb.slot[s] = ju;
          asmb.coeff[s] = t;
        } else {
          g.multi_index(cj, jdx);
          for (int e = 0; e < n; ++e) y[e] = g.centers[e][jdx[e]];
          const double value =
              g.klass(cj) == CellClass::Obstacle ? bc.obstacle(y) : bc.outer(y);
          asmb.rhs[u] += t * value;
        }
      }
    }
  }
  return asmb;
}

void apply_operator(const Assembly& A, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
  const int deg = 2 * A.n_axes;
  for (long long u = 0; u < A.n_unknowns; ++u) {
    double acc = A.diag[u] * x[u];
    const size_t base = static_cast<size_t>(u) * deg;
    for (int s = 0; s < deg; ++s) {
      const std::int32_t j = A.slot[base + s];
      if (j >= 0) acc -= A.coeff[base + s] * x[j];
    }
    y[u] = acc;
  }
}

/// SSOR preconditioner solve M z = r with M = (D+L) D^{-1} (D+U). Minus-side
/// slots reference strictly smaller unknown indices, so one ascending and one
/// descending sweep suffice.
void apply_ssor(const Assembly& A, const Eigen::VectorXd& r, Eigen::VectorXd& z) {
  const int n = A.n_axes;
  const int deg = 2 * n;
  for (long long u = 0; u < A.n_unknowns; ++u) {
    double acc = r[u];
    const size_t base = static_cast<size_t>(u) * deg;
    for (int s = 0; s < n; ++s) {
      const std::int32_t j = A.slot[base + s];
      if (j >= 0) acc += A.coeff[base + s] * z[j];
    }
    z[u] = acc / A.diag[u];
  }
  for (long long u = A.n_unknowns - 1; u >= 0; --u) {
    double acc = z[u] * A.diag[u];
    const size_t base = static_cast<size_t>(u) * deg;
    for (int s = n; s < deg; ++s) {
      const std::int32_t j = A.slot[base + s];
      if (j >= 0) acc += A.coeff[base + s] * z[j];
    }
    z[u] = acc / A.diag[u];
  }
}

Eigen::VectorXd pcg(const Assembly& A, const Eigen::VectorXd& b, const SolveParams& params,
                    SolveStats* stats) {
  const long long m = A.n_unknowns;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  const double norm_b = b.norm();
  if (norm_b == 0.0) {
    if (stats) *stats = {0, 0.0};
    return x;
  }
  long long max_iter = params.max_iterations;
  if (max_iter <= 0)
    max_iter = 2000 + 50 * static_cast<long long>(std::cbrt(static_cast<double>(m)));

  Eigen::VectorXd r = b, z(m), p(m), q(m);
  apply_ssor(A, r, z);
  p = z;
  double rho = r.dot(z);
  double rel = 1.0;
  long long it = 0;
  double best_rel = 1.0;
  long long stagnant = 0;
  for (; it < max_iter; ++it) {
    rel = r.norm() / norm_b;
    if (rel <= params.rel_tol) break;
    if (rel < best_rel * 0.999) {
      best_rel = std::min(best_rel, rel);
      stagnant = 0;
    } else if (++stagnant > 400) {
      break;  // residual floor reached
    }
    apply_operator(A, p, q);
    const double pq = p.dot(q);
    if (pq <= 0.0) throw NumericError("pcg: operator lost positive definiteness", rel);
    const double alpha = rho / pq;
    x += alpha * p;
    r -= alpha * q;
    apply_ssor(A, r, z);
    const double rho_next = r.dot(z);
    p = z + (rho_next / rho) * p;
    rho = rho_next;
  }
  rel = r.norm() / norm_b;
  if (stats) *stats = {it, rel};
  if (rel > std::max(params.rel_tol * 100.0, 1e-6))
    throw NumericError("pcg: did not converge, relative residual " + std::to_string(rel), rel);
  return x;
}

GridFunction expand_solution(const GridPtr& grid, const Assembly& A, const Eigen::VectorXd& x,
                             const BoundaryData& bc) {
  const Grid& g = *grid;
  GridFunction f;
  f.grid = grid;
  f.values = Eigen::VectorXd::Zero(g.total_cells);
  std::vector<long long> idx(g.dimension);
  Vector y(g.dimension);
  for (long long c = 0; c < g.total_cells; ++c) {
    if (g.klass(c) == CellClass::Interior) continue;
    g.multi_index(c, idx);
    for (int d = 0; d < g.dimension; ++d) y[d] = g.centers[d][idx[d]];
    f.values[c] = g.klass(c) == CellClass::Obstacle ? bc.obstacle(y) : bc.outer(y);
  }
  for (long long u = 0; u < A.n_unknowns; ++u) f.values[A.cells[static_cast<size_t>(u)]] = x[u];
  return f;
}

void check_grid_field(const Grid& g, const CoefficientField& field) {
  if (g.dimension != field.dimension)
    throw ParameterError("solver: grid and field dimensions differ");
}

}  // namespace

GridFunction solve_dirichlet(const GridPtr& grid, const CoefficientField& field,
                             const BoundaryData& bc, const SolveParams& params,
                             SolveStats* stats) {
  check_grid_field(*grid, field);
  if (grid->interior_cells == 0)
    throw ParameterError("solve_dirichlet: grid has no interior cells");
  Assembly A = assemble(*grid, field, bc);
  Eigen::VectorXd x = pcg(A, A.rhs, params, stats);
  return expand_solution(grid, A, x, bc);
}

GridFunction solve_point_source(const GridPtr& grid, const CoefficientField& field,
                                const Vector& source, double strength, const SolveParams& params,
                                SolveStats* stats) {
  check_grid_field(*grid, field);
  const BoundaryData bc = constant_bc(0.0, 0.0);
  Assembly A = assemble(*grid, field, bc);
  const long long cell = grid->locate(source);
  if (cell < 0 || grid->klass(cell) != CellClass::Interior)
    throw DomainError("solve_point_source: source cell must be interior");
  std::int32_t source_unknown = -1;
  for (long long u = 0; u < A.n_unknowns; ++u) {
    if (A.cells[static_cast<size_t>(u)] == cell) {
      source_unknown = static_cast<std::int32_t>(u);
      break;
    }
  }
  Eigen::VectorXd b = A.rhs;
  b[source_unknown] += strength;
  Eigen::VectorXd x = pcg(A, b, params, stats);
  return expand_solution(grid, A, x, bc);
}

double dirichlet_energy(const GridFunction& u, const CoefficientField& field) {
  const Grid& g = *u.grid;
  check_grid_field(g, field);
  const std::vector<double> a = field_values(g, field);
  double energy = 0.0;
  std::vector<long long> idx(g.dimension, 0);
  for (long long c = 0; c < g.total_cells; ++c) {
    double volume = 1.0;
    for (int d = 0; d < g.dimension; ++d) volume *= g.widths[d][idx[d]];
    for (int d = 0; d < g.dimension; ++d) {
      if (idx[d] + 1 >= g.cells_per_axis[d]) continue;
      const long long cj = c + g.strides[d];
      if (g.klass(c) == CellClass::Outer && g.klass(cj) == CellClass::Outer) continue;
      const double area = volume / g.widths[d][idx[d]];
      const double t = transmissibility(g, a, idx, c, cj, d, area);
      const double du = u.values[c] - u.values[cj];
      energy += t * du * du;
    }
    for (int d = 0; d < g.dimension; ++d) {
      if (++idx[d] < g.cells_per_axis[d]) break;
      idx[d] = 0;
    }
  }
  return energy;
}

CapacitaryResult capacitary_potential(const GridPtr& grid, const CoefficientField& field,
                                      const SolveParams& params) {
  CapacitaryResult result;
  result.obstacle_cells = grid->obstacle_cells;
  if (grid->outer_radius <= 0)
    throw ParameterError("capacitary_potential: grid must have an outer truncation sphere");
  if (grid->obstacle_cells == 0) {
    result.potential.grid = grid;
    result.potential.values = Eigen::VectorXd::Zero(grid->total_cells);
    return result;
  }
  const BoundaryData bc = constant_bc(1.0, 0.0);
  result.potential = solve_dirichlet(grid, field, bc, params);
  result.energy = dirichlet_energy(result.potential, field);
  const int n = grid->dimension;
  result.capacity_raw = result.energy / kernel_energy_constant(n);
  const double outer_term = std::pow(grid->outer_radius, 2 - n);
  result.capacity =
      result.capacity_raw > 0 ? 1.0 / (1.0 / result.capacity_raw + outer_term) : 0.0;
  return result;
}

GridFunction discrete_green(const GridPtr& grid, const CoefficientField& field,
                            const Vector& source, const SolveParams& params) {
  return solve_point_source(grid, field, source, kernel_energy_constant(grid->dimension),
                            params);
}

MeasurePdeResult harmonic_measure_pde(const SetSpec& set, const Vector& x,
                                      const std::vector<double>& radii,
                                      const CoefficientField& field,
                                      const PdeMeasureOptions& options,
                                      const SolveParams& params) {
  if (radii.empty()) throw ParameterError("harmonic_measure_pde: no radii given");
  if (!std::is_sorted(radii.begin(), radii.end()))
    throw ParameterError("harmonic_measure_pde: radii must be increasing");
  if (radii.front() < 2.0 * x.norm())
    throw ParameterError("harmonic_measure_pde: first radius must be at least 2|x|");
  if (set.contains(x)) throw DomainError("harmonic_measure_pde: x lies inside the obstacle");

  MeasurePdeResult result;
  result.radii = radii;
  result.h = options.h;
  const double r_max = radii.back();
  std::vector<AxisGrading> axes;
  if (options.fine_radius > 0.0) {
    const double fine = std::min(options.fine_radius, r_max);
    const double outer = r_max * 1.05 + 2.0 * options.h;
    axes.assign(set.dimension,
                AxisGrading{-fine, fine, options.h, -outer, outer, options.growth});
  }
  const BoundaryData bc = constant_bc(0.0, 1.0);
  for (double radius : radii) {
    // one master axis layout for every radius keeps the grids nested, so the
    // monotone-in-R comparison is exact up to solver tolerance
    GridPtr grid = axes.empty()
                       ? make_uniform_sphere_grid(set.dimension, radius, options.h, &set)
                       : make_graded_sphere_grid(set.dimension, axes, radius, &set);
    result.finest_cells = grid->total_cells;
    double value;
    if (grid->obstacle_cells == 0) {
      value = 1.0;  // no rasterized obstacle: the solution is identically 1
    } else {
      GridFunction u = solve_dirichlet(grid, field, bc, params);
      value = u.interpolate(x);
    }
    if (!result.values.empty() && value > result.values.back() + 1e-6)
      throw NumericError("harmonic_measure_pde: sequence increased in R", value);
    result.values.push_back(std::min(value, result.values.empty() ? 1.0 : result.values.back()));
  }
  double ratio = 2.0;
  if (radii.size() >= 2) ratio = radii[1] / radii[0];
  result.extrapolated =
      std::clamp(richardson_tail(result.values, ratio, set.dimension - 2), 0.0, 1.0);
  result.ci_halfwidth = std::abs(result.extrapolated - result.values.back());
  return result;
}

}  // namespace capinf
