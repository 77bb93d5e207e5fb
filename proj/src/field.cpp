#include "capinf/field.hpp"

#include "capinf/rng.hpp"

#include <cmath>
#include <sstream>

namespace capinf {

namespace {

long long grid_cell(double coord, double cell) {
  return static_cast<long long>(std::floor(coord / cell));
}

}  // namespace

std::string CoefficientField::describe() const {
  std::ostringstream os;
  switch (kind) {
    case FieldKind::Identity: os << "identity"; break;
    case FieldKind::Checkerboard: os << "checkerboard(lambda=" << lambda << ",cell=" << cell << ")"; break;
    case FieldKind::CellwiseRandom:
      os << "cellwise_random(lambda=" << lambda << ",cell=" << cell << ",seed=" << seed << ")";
      break;
  }
  return os.str();
}

CoefficientField make_identity_field(int dimension) {
  require_dimension(dimension);
  CoefficientField f;
  f.dimension = dimension;
  f.lambda = 1.0;
  f.kind = FieldKind::Identity;
  f.scalar = [](const Vector&) { return 1.0; };
  return f;
}

CoefficientField make_checkerboard_field(int dimension, double lambda, double cell) {
  require_dimension(dimension);
  if (lambda < 1.0) throw ParameterError("checkerboard: lambda must be >= 1");
  if (cell <= 0.0) throw ParameterError("checkerboard: cell size must be positive");
  CoefficientField f;
  f.dimension = dimension;
  f.lambda = lambda;
  f.kind = FieldKind::Checkerboard;
  f.cell = cell;
  // irrational offset so cell-center sampling on dyadic grids never aligns
  // with the pattern boundaries
  const double offset = cell / M_PI;
  f.scalar = [lambda, cell, offset](const Vector& x) {
    long long parity = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) parity += grid_cell(x[i] - offset, cell);
    return (parity & 1) ? 1.0 / lambda : lambda;
  };
  return f;
}

CoefficientField make_cellwise_random_field(int dimension, double lambda, double cell,
                                            std::uint64_t seed) {
  require_dimension(dimension);
  if (lambda < 1.0) throw ParameterError("cellwise_random: lambda must be >= 1");
  if (cell <= 0.0) throw ParameterError("cellwise_random: cell size must be positive");
  CoefficientField f;
  f.dimension = dimension;
  f.lambda = lambda;
  f.kind = FieldKind::CellwiseRandom;
  f.cell = cell;
  f.seed = seed;
  f.scalar = [lambda, cell, seed](const Vector& x) {
    std::uint64_t h = seed ^ 0xc2b2ae3d27d4eb4fULL;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      std::uint64_t k = static_cast<std::uint64_t>(grid_cell(x[i], cell) + (1LL << 40));
      h = splitmix64(h) ^ (k * 0x9e3779b97f4a7c15ULL);
    }
    const double u = 2.0 * (static_cast<double>(splitmix64(h) >> 11) * 0x1p-53) - 1.0;
    return std::pow(lambda, u);
  };
  return f;
}

CoefficientField make_field(FieldKind kind, int dimension, double lambda, double cell,
                            std::uint64_t seed) {
  switch (kind) {
    case FieldKind::Identity: return make_identity_field(dimension);
    case FieldKind::Checkerboard: return make_checkerboard_field(dimension, lambda, cell);
    case FieldKind::CellwiseRandom:
      return make_cellwise_random_field(dimension, lambda, cell, seed);
  }
  throw ParameterError("make_field: unknown kind");
}

CoefficientField rescale(const CoefficientField& field, double scale) {
  if (scale <= 0.0) throw ParameterError("rescale(field): scale must be positive");
  CoefficientField f = field;
  auto base = field.scalar;
  f.scalar = [base, scale](const Vector& x) { return base(scale * x); };
  f.cell = field.cell / scale;
  return f;
}

void check_ellipticity(const CoefficientField& field, int samples, std::uint64_t seed,
                       double box_half_width) {
  RandomEngine eng = make_engine(seed, 0xe11f);
  std::uniform_real_distribution<double> uni(-box_half_width, box_half_width);
  Vector x(field.dimension), xi(field.dimension);
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < field.dimension; ++i) x[i] = uni(eng);
    sample_unit_direction(eng, xi);
    const Matrix a = field.tensor(x);
    if (!a.isApprox(a.transpose(), 1e-12))
      throw ValidationError("coefficient field is not symmetric at a sample point");
    const double q = xi.dot(a * xi);
    const double tol = 1e-12;
    if (q < 1.0 / field.lambda - tol || q > field.lambda + tol)
      throw ValidationError("coefficient field violates the ellipticity bounds");
  }
}

}  // namespace capinf
