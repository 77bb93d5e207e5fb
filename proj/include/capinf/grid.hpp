#pragma once

#include "capinf/common.hpp"
#include "capinf/geometry.hpp"

#include <memory>
#include <vector>

namespace capinf {

enum class CellClass : std::uint8_t { Interior = 0, Obstacle = 1, Outer = 2 };

/// Tensor-product cell-centered grid in R^N. Axes are independent ascending
/// face-coordinate arrays, so both uniform boxes and graded (geometrically
/// stretched) grids share one representation. Cells are classified once at
/// construction: obstacle cells are exactly those whose centers satisfy the
/// set membership.
struct Grid {
  int dimension = 3;
  std::vector<Eigen::VectorXd> faces;    // per axis, size n_d + 1
  std::vector<Eigen::VectorXd> centers;  // per axis, size n_d
  std::vector<Eigen::VectorXd> widths;   // per axis, size n_d
  std::vector<long long> cells_per_axis;
  std::vector<long long> strides;
  long long total_cells = 0;
  std::vector<std::uint8_t> cell_class;
  double outer_radius = 0.0;  // 0 when the outer boundary is the box itself
  double spacing = 0.0;       // uniform h; 0 for graded grids
  long long obstacle_cells = 0;
  long long interior_cells = 0;

  CellClass klass(long long cell) const { return static_cast<CellClass>(cell_class[cell]); }
  void multi_index(long long cell, std::vector<long long>& idx) const;
  void cell_center(const std::vector<long long>& idx, Vector& out) const;
  double cell_volume(const std::vector<long long>& idx) const;
  /// Linear index of the cell containing x, or -1 outside the grid.
  long long locate(const Vector& x) const;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Uniform grid on [-H, H]^N with H = (ceil(R/h) + 2) h; cells with centers at
/// |x| >= outer_radius are outer-boundary cells.
GridPtr make_uniform_sphere_grid(int dimension, double outer_radius, double h,
                                 const SetSpec* obstacle);

/// Uniform grid on [-H, H]^N whose outermost cell layer is the Dirichlet
/// boundary (no truncation sphere).
GridPtr make_uniform_box_grid(int dimension, double half_width, double h,
                              const SetSpec* obstacle);

/// One axis of a graded grid: uniform spacing h_fine on [fine_lo, fine_hi],
/// geometrically growing intervals out to [outer_lo, outer_hi].
struct AxisGrading {
  double fine_lo = -1.0;
  double fine_hi = 1.0;
  double h_fine = 0.1;
  double outer_lo = -4.0;
  double outer_hi = 4.0;
  double ratio = 1.35;
  double max_step = kInfinity;  // caps the grown interval width
};

Eigen::VectorXd graded_axis(const AxisGrading& g);

GridPtr make_graded_sphere_grid(int dimension, const std::vector<AxisGrading>& axes,
                                double outer_radius, const SetSpec* obstacle);

/// Scalar field on a grid. Boundary cells hold their Dirichlet values.
struct GridFunction {
  GridPtr grid;
  Eigen::VectorXd values;

  /// Multilinear interpolation between the 2^N surrounding cell centers
  /// (clamped to the grid).
  double interpolate(const Vector& x) const;
};

/// Flat binary dump: a small ASCII header (dimension, cells per axis,
/// uniform spacing or 0, per-axis face coordinates) followed by the raw
/// little-endian doubles of the cell values.
void write_grid_binary(const GridFunction& f, const std::string& path);
GridFunction read_grid_binary(const std::string& path);

/// CSV slice along the given axis at fixed index: remaining coordinates and
/// the value per row. For plots.
void write_slice_csv(const GridFunction& f, int axis, long long index, const std::string& path);

}  // namespace capinf
