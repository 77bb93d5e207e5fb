#pragma once

#include "capinf/common.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace capinf {

enum class ShapeKind {
  Empty,
  Ball,
  AxisRay,
  SolidCylinder,
  PowerThorn,
  DyadicBallUnion,
  Union,
  ComplementOfBall,
  ShellRestriction,
  RadialTruncation,
  Rescaled,
};

std::string to_string(ShapeKind kind);

/// Implicit description of a closed obstacle set in R^N.
///
/// `contains` is the exact membership predicate (one-dimensional shapes are
/// represented by their delta-thickened tubes, since zero-measure sets are
/// invisible to samplers and grids). `distance_lb` returns a conservative
/// lower bound on the Euclidean distance to the set: zero on the set itself,
/// never more than the true distance.
struct SetSpec {
  int dimension = 3;
  std::function<bool(const Vector&)> contains;
  std::function<double(const Vector&)> distance_lb;

  /// Radius of a ball around the origin containing the whole set, when the
  /// set is bounded. Empty sets report 0.
  std::optional<double> outer_radius;

  /// Smallest cross-sectional scale of the set. Estimators that detect hits
  /// within some tolerance must keep that tolerance below this scale, or a
  /// thin set would be artificially fattened. Solid shapes report +inf.
  double thickness = kInfinity;

  ShapeKind kind = ShapeKind::Empty;
  std::vector<double> params;

  bool bounded() const { return outer_radius.has_value(); }
  bool empty() const { return outer_radius && *outer_radius <= 0.0; }
  std::string describe() const;
};

/// Dyadic spherical shell 2^{n-1} <= |x| <= 2^n intersected with a set.
struct ShellRegion {
  int index = 1;
  double inner_radius = 1.0;
  double outer_radius = 2.0;
  SetSpec restricted;
};

/// Canonical obstacle families. Parameter conventions:
///   empty:                {}
///   ball:                 {c_1, ..., c_N, R}, or {R} for a ball at the origin
///   axis_ray:             {start} or {start, delta}; the tube
///                         {x_1 >= start, |x'| <= delta}, delta defaults to 1e-3
///   solid_cylinder:       {radius, start}; {x_1 >= start, |x'| <= radius}
///   power_thorn:          {alpha}; {x_1 >= 1, |x'| <= x_1^alpha}, 0 < alpha <= 1
///   dyadic_ball_union:    {growth, scale}; balls of radius scale * 2^{growth*n}
///                         centered at 2^n e_1, n = 1, 2, ...
///   complement_of_ball:   {R}; {|x| >= R}
SetSpec make_canonical(ShapeKind kind, const std::vector<double>& params, int dimension);

/// Union of finitely many sets: membership is any-of, the distance bound is
/// the minimum of the member bounds.
SetSpec make_union(const std::vector<SetSpec>& parts);

/// Parse "kind:p1,p2,..." (e.g. "ball:0,0,0,1" or "solid_cylinder:1,0").
SetSpec parse_shape(const std::string& text, int dimension);

ShellRegion shell(const SetSpec& set, int index);

/// Set intersected with the closed ball |x| <= rho.
SetSpec radial_truncation(const SetSpec& set, double rho);

/// General annulus restriction r_lo <= |x| <= r_hi (used by the
/// fundamental-solution-level shells of the lambda-form series).
SetSpec annulus_restriction(const SetSpec& set, double r_lo, double r_hi);

/// The set scaled by 1/scale (points x of the result correspond to scale*x of
/// the original). Capacities transform as cap(E) = scale^{N-2} cap(E/scale).
SetSpec rescale(const SetSpec& set, double scale);

inline double distance_lower_bound(const SetSpec& set, const Vector& x) {
  return set.distance_lb(x);
}

/// Deterministic rejection sampling of points of the region. Throws
/// EmptyRegionError when the region is empty or the acceptance rate falls
/// below 1 / max_attempts_per_point.
std::vector<Vector> sample_region(const ShellRegion& region, int count, std::uint64_t seed,
                                  int max_attempts_per_point = 4096);

}  // namespace capinf
