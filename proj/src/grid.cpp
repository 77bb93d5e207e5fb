#include "capinf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace capinf {

namespace {

constexpr long long kMaxCells = 120'000'000;

void finalize(Grid& grid, const SetSpec* obstacle) {
  const int n = grid.dimension;
  grid.centers.resize(n);
  grid.widths.resize(n);
  grid.cells_per_axis.resize(n);
  for (int d = 0; d < n; ++d) {
    const auto& f = grid.faces[d];
    const long long m = f.size() - 1;
    if (m < 3) throw ParameterError("grid: need at least 3 cells per axis");
    grid.cells_per_axis[d] = m;
    grid.centers[d] = 0.5 * (f.head(m) + f.tail(m));
    grid.widths[d] = f.tail(m) - f.head(m);
    if ((grid.widths[d].array() <= 0).any())
      throw ParameterError("grid: face coordinates must be strictly increasing");
  }
  grid.strides.assign(n, 1);
  grid.total_cells = 1;
  for (int d = 0; d < n; ++d) {
    grid.strides[d] = grid.total_cells;
    grid.total_cells *= grid.cells_per_axis[d];
    if (grid.total_cells > kMaxCells) throw ParameterError("grid: too many cells");
  }

  grid.cell_class.assign(static_cast<size_t>(grid.total_cells),
                         static_cast<std::uint8_t>(CellClass::Interior));
  std::vector<long long> idx(n, 0);
  Vector x(n);
  for (long long c = 0; c < grid.total_cells; ++c) {
    bool on_box_edge = false;
    for (int d = 0; d < n; ++d) {
      x[d] = grid.centers[d][idx[d]];
      on_box_edge = on_box_edge || idx[d] == 0 || idx[d] == grid.cells_per_axis[d] - 1;
    }
    CellClass cls = CellClass::Interior;
    if (on_box_edge || (grid.outer_radius > 0.0 && x.norm() >= grid.outer_radius)) {
      cls = CellClass::Outer;
    } else if (obstacle && obstacle->contains(x)) {
      cls = CellClass::Obstacle;
      ++grid.obstacle_cells;
    } else {
      ++grid.interior_cells;
    }
    grid.cell_class[c] = static_cast<std::uint8_t>(cls);
    for (int d = 0; d < n; ++d) {
      if (++idx[d] < grid.cells_per_axis[d]) break;
      idx[d] = 0;
    }
  }
}

Eigen::VectorXd uniform_axis(double half_width, double h) {
  const long long half_cells = static_cast<long long>(std::ceil(half_width / h));
  const long long m = 2 * half_cells;
  Eigen::VectorXd f(m + 1);
  for (long long i = 0; i <= m; ++i) f[i] = (i - half_cells) * h;
  return f;
}

}  // namespace

void Grid::multi_index(long long cell, std::vector<long long>& idx) const {
  idx.resize(dimension);
  for (int d = dimension - 1; d >= 0; --d) {
    idx[d] = cell / strides[d];
    cell -= idx[d] * strides[d];
  }
}

void Grid::cell_center(const std::vector<long long>& idx, Vector& out) const {
  out.resize(dimension);
  for (int d = 0; d < dimension; ++d) out[d] = centers[d][idx[d]];
}

double Grid::cell_volume(const std::vector<long long>& idx) const {
  double v = 1.0;
  for (int d = 0; d < dimension; ++d) v *= widths[d][idx[d]];
  return v;
}

long long Grid::locate(const Vector& x) const {
  long long cell = 0;
  for (int d = 0; d < dimension; ++d) {
    const auto& f = faces[d];
    if (x[d] < f[0] || x[d] > f[f.size() - 1]) return -1;
    const double* begin = f.data();
    const double* end = f.data() + f.size();
    long long i = std::upper_bound(begin, end, x[d]) - begin - 1;
    i = std::clamp<long long>(i, 0, cells_per_axis[d] - 1);
    cell += i * strides[d];
  }
  return cell;
}

GridPtr make_uniform_sphere_grid(int dimension, double outer_radius, double h,
                                 const SetSpec* obstacle) {
  require_dimension(dimension);
  if (h <= 0 || outer_radius <= 0) throw ParameterError("grid: need positive radius and spacing");
  auto grid = std::make_shared<Grid>();
  grid->dimension = dimension;
  grid->outer_radius = outer_radius;
  grid->spacing = h;
  grid->faces.assign(dimension, uniform_axis(outer_radius + 2.0 * h, h));
  finalize(*grid, obstacle);
  return grid;
}

GridPtr make_uniform_box_grid(int dimension, double half_width, double h,
                              const SetSpec* obstacle) {
  require_dimension(dimension);
  if (h <= 0 || half_width <= 0) throw ParameterError("grid: need positive extent and spacing");
  auto grid = std::make_shared<Grid>();
  grid->dimension = dimension;
  grid->outer_radius = 0.0;
  grid->spacing = h;
  grid->faces.assign(dimension, uniform_axis(half_width, h));
  finalize(*grid, obstacle);
  return grid;
}

Eigen::VectorXd graded_axis(const AxisGrading& g) {
  if (!(g.outer_lo <= g.fine_lo && g.fine_lo < g.fine_hi && g.fine_hi <= g.outer_hi))
    throw ParameterError("graded_axis: need outer_lo <= fine_lo < fine_hi <= outer_hi");
  if (g.h_fine <= 0 || g.ratio <= 1.0) throw ParameterError("graded_axis: bad spacing or ratio");
  std::vector<double> faces;
  const long long m = std::max<long long>(1, std::llround((g.fine_hi - g.fine_lo) / g.h_fine));
  const double h = (g.fine_hi - g.fine_lo) / m;
  for (long long i = 0; i <= m; ++i) faces.push_back(g.fine_lo + i * h);
  double step = std::min(h * g.ratio, g.max_step);
  double x = g.fine_hi;
  while (x < g.outer_hi - 1e-12 * std::abs(g.outer_hi)) {
    x = std::min(x + step, g.outer_hi);
    faces.push_back(x);
    step = std::min(step * g.ratio, g.max_step);
  }
  step = std::min(h * g.ratio, g.max_step);
  x = g.fine_lo;
  while (x > g.outer_lo + 1e-12 * std::abs(g.outer_lo)) {
    x = std::max(x - step, g.outer_lo);
    faces.push_back(x);
    step = std::min(step * g.ratio, g.max_step);
  }
  std::sort(faces.begin(), faces.end());
  Eigen::VectorXd out(faces.size());
  for (size_t i = 0; i < faces.size(); ++i) out[i] = faces[i];
  return out;
}

GridPtr make_graded_sphere_grid(int dimension, const std::vector<AxisGrading>& axes,
                                double outer_radius, const SetSpec* obstacle) {
  require_dimension(dimension);
  if (static_cast<int>(axes.size()) != dimension)
    throw ParameterError("graded grid: one AxisGrading per axis required");
  auto grid = std::make_shared<Grid>();
  grid->dimension = dimension;
  grid->outer_radius = outer_radius;
  grid->spacing = 0.0;
  for (const auto& a : axes) grid->faces.push_back(graded_axis(a));
  finalize(*grid, obstacle);
  return grid;
}

double GridFunction::interpolate(const Vector& x) const {
  const Grid& g = *grid;
  const int n = g.dimension;
  std::vector<long long> base(n);
  std::vector<double> weight(n);  // weight of the upper cell per axis
  for (int d = 0; d < n; ++d) {
    const auto& c = g.centers[d];
    const long long m = g.cells_per_axis[d];
    if (x[d] <= c[0]) {
      base[d] = 0;
      weight[d] = 0.0;
    } else if (x[d] >= c[m - 1]) {
      base[d] = m - 2;
      weight[d] = 1.0;
    } else {
      const double* begin = c.data();
      long long i = std::upper_bound(begin, begin + m, x[d]) - begin - 1;
      i = std::clamp<long long>(i, 0, m - 2);
      base[d] = i;
      weight[d] = (x[d] - c[i]) / (c[i + 1] - c[i]);
    }
  }
  double acc = 0.0;
  const int corners = 1 << n;
  for (int mask = 0; mask < corners; ++mask) {
    double w = 1.0;
    long long cell = 0;
    for (int d = 0; d < n; ++d) {
      const bool hi = mask & (1 << d);
      w *= hi ? weight[d] : 1.0 - weight[d];
      cell += (base[d] + (hi ? 1 : 0)) * g.strides[d];
    }
    if (w != 0.0) acc += w * values[cell];
  }
  return acc;
}

void write_grid_binary(const GridFunction& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  const Grid& g = *f.grid;
  out << "capinf-grid 1\n" << g.dimension << "\n";
  for (int d = 0; d < g.dimension; ++d) out << g.cells_per_axis[d] << (d + 1 < g.dimension ? " " : "\n");
  out << g.spacing << "\n";
  for (int d = 0; d < g.dimension; ++d) {
    for (long long i = 0; i < g.faces[d].size(); ++i)
      out << g.faces[d][i] << (i + 1 < g.faces[d].size() ? " " : "\n");
  }
  out.write(reinterpret_cast<const char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(double)));
}

GridFunction read_grid_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "capinf-grid" || version != 1) throw ValidationError("bad grid dump header");
  auto grid = std::make_shared<Grid>();
  in >> grid->dimension;
  require_dimension(grid->dimension);
  std::vector<long long> cells(grid->dimension);
  for (auto& c : cells) in >> c;
  in >> grid->spacing;
  for (int d = 0; d < grid->dimension; ++d) {
    Eigen::VectorXd f(cells[d] + 1);
    for (long long i = 0; i <= cells[d]; ++i) in >> f[i];
    grid->faces.push_back(f);
  }
  in.ignore(1);  // newline before the raw block
  finalize(*grid, nullptr);
  GridFunction out;
  out.values.resize(grid->total_cells);
  in.read(reinterpret_cast<char*>(out.values.data()),
          static_cast<std::streamsize>(grid->total_cells * sizeof(double)));
  if (!in) throw ValidationError("grid dump truncated");
  out.grid = grid;
  return out;
}

void write_slice_csv(const GridFunction& f, int axis, long long index, const std::string& path) {
  const Grid& g = *f.grid;
  if (axis < 0 || axis >= g.dimension) throw ParameterError("slice: bad axis");
  if (index < 0 || index >= g.cells_per_axis[axis]) throw ParameterError("slice: bad index");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (int d = 0; d < g.dimension; ++d)
    if (d != axis) out << "x" << d << ",";
  out << "value\n";
  std::vector<long long> idx(g.dimension, 0);
  idx[axis] = index;
  bool done = false;
  while (!done) {
    long long cell = 0;
    for (int d = 0; d < g.dimension; ++d) cell += idx[d] * g.strides[d];
    for (int d = 0; d < g.dimension; ++d)
      if (d != axis) out << g.centers[d][idx[d]] << ",";
    out << f.values[cell] << "\n";
    done = true;
    for (int d = 0; d < g.dimension; ++d) {
      if (d == axis) continue;
      if (++idx[d] < g.cells_per_axis[d]) {
        done = false;
        break;
      }
      idx[d] = 0;
    }
  }
}

}  // namespace capinf
