#pragma once

#include "capinf/common.hpp"

#include <cstdint>
#include <functional>
#include <string>

namespace capinf {

enum class FieldKind { Identity, Checkerboard, CellwiseRandom };

/// Symmetric coefficient field a_ij(x) of a uniformly elliptic operator,
/// with eigenvalues in [1/lambda, lambda]. The default discretization uses
/// scalar fields a_ij = a(x) delta_ij; the canonical kinds are all scalar,
/// piecewise constant on cubes of the given cell size.
struct CoefficientField {
  int dimension = 3;
  double lambda = 1.0;
  FieldKind kind = FieldKind::Identity;
  double cell = 1.0;
  std::uint64_t seed = 0;

  std::function<double(const Vector&)> scalar;

  Matrix tensor(const Vector& x) const {
    return scalar(x) * Matrix::Identity(dimension, dimension);
  }
  std::string describe() const;
};

CoefficientField make_identity_field(int dimension);

/// a(x) = lambda on cells of even parity, 1/lambda on odd parity.
CoefficientField make_checkerboard_field(int dimension, double lambda, double cell);

/// a(x) = lambda^u with u uniform in [-1, 1], constant per cell, derived from
/// a hash of the cell index so evaluation is pure.
CoefficientField make_cellwise_random_field(int dimension, double lambda, double cell,
                                            std::uint64_t seed);

CoefficientField make_field(FieldKind kind, int dimension, double lambda, double cell,
                            std::uint64_t seed);

/// The field rescaled to match geometry rescaled by 1/scale: a'(x) = a(scale*x).
CoefficientField rescale(const CoefficientField& field, double scale);

/// Spot-check symmetry and the ellipticity bounds on random sample points and
/// directions; throws ValidationError on violation.
void check_ellipticity(const CoefficientField& field, int samples, std::uint64_t seed,
                       double box_half_width = 16.0);

}  // namespace capinf
