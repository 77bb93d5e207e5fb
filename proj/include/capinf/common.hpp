#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace capinf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Invalid shape parameters, bad configuration values, unusable grids.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnsupportedDimensionError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// Iterative solve failed to converge; carries the final residual.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_ = std::numeric_limits<double>::quiet_NaN();
};

/// Rejection sampling found nothing, or an estimator saw an empty region
/// where it needed mass.
class EmptyRegionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too few series terms (or paths) to run a classifier or estimator.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs violate a structural contract (negative capacity, non-monotone
/// cumulative capacity, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Query point lies outside the admissible domain (e.g. inside the obstacle).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closed interval [low, high]; used to carry confidence bounds through
/// series arithmetic.
struct Interval {
  double low = 0.0;
  double high = 0.0;

  double width() const { return high - low; }
  Interval operator+(const Interval& o) const { return {low + o.low, high + o.high}; }
  Interval operator*(double c) const {
    return c >= 0 ? Interval{low * c, high * c} : Interval{high * c, low * c};
  }
};

/// Surface area of the unit sphere S^{N-1} in R^N.
inline double unit_sphere_area(int dimension) {
  if (dimension < 2) throw UnsupportedDimensionError("unit_sphere_area: N >= 2 required");
  return 2.0 * std::pow(M_PI, 0.5 * dimension) / std::tgamma(0.5 * dimension);
}

/// Dirichlet energy of the equilibrium potential of a ball of radius R equals
/// this constant times R^{N-2}; dividing energies by it puts capacities in the
/// kernel normalization cap(ball R) = R^{N-2}.
inline double kernel_energy_constant(int dimension) {
  if (dimension < 3) throw UnsupportedDimensionError("kernel_energy_constant: N >= 3 required");
  return (dimension - 2) * unit_sphere_area(dimension);
}

inline void require_dimension(int dimension) {
  if (dimension < 3)
    throw UnsupportedDimensionError("dimension must be at least 3, got " +
                                    std::to_string(dimension));
}

}  // namespace capinf
