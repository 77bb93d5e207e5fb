#include "capinf/geometry.hpp"

#include "capinf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace capinf {

namespace {

double tail_norm(const Vector& x) { return x.tail(x.size() - 1).norm(); }

void require_params(bool ok, const std::string& message) {
  if (!ok) throw ParameterError(message);
}

/// Distance from x to the capped tube {x_1 >= start, |x'| <= radius}.
double tube_distance(const Vector& x, double start, double radius) {
  const double axial = start - x[0];              // > 0 when behind the cap
  const double trans = tail_norm(x) - radius;     // > 0 when outside the mantle
  if (axial <= 0.0) return std::max(0.0, trans);
  if (trans <= 0.0) return axial;
  return std::hypot(axial, trans);
}

}  // namespace

std::string to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Empty: return "empty";
    case ShapeKind::Ball: return "ball";
    case ShapeKind::AxisRay: return "axis_ray";
    case ShapeKind::SolidCylinder: return "solid_cylinder";
    case ShapeKind::PowerThorn: return "power_thorn";
    case ShapeKind::DyadicBallUnion: return "dyadic_ball_union";
    case ShapeKind::Union: return "union";
    case ShapeKind::ComplementOfBall: return "complement_of_ball";
    case ShapeKind::ShellRestriction: return "shell";
    case ShapeKind::RadialTruncation: return "truncation";
    case ShapeKind::Rescaled: return "rescaled";
  }
  return "unknown";
}

std::string SetSpec::describe() const {
  std::ostringstream os;
  os << to_string(kind);
  if (!params.empty()) {
    os << ":";
    for (size_t i = 0; i < params.size(); ++i) os << (i ? "," : "") << params[i];
  }
  return os.str();
}

SetSpec make_canonical(ShapeKind kind, const std::vector<double>& params, int dimension) {
  require_dimension(dimension);
  const int n = dimension;
  SetSpec s;
  s.dimension = n;
  s.kind = kind;
  s.params = params;

  switch (kind) {
    case ShapeKind::Empty: {
      require_params(params.empty(), "empty: takes no parameters");
      s.contains = [](const Vector&) { return false; };
      s.distance_lb = [](const Vector&) { return kInfinity; };
      s.outer_radius = 0.0;
      return s;
    }
    case ShapeKind::Ball: {
      Vector center = Vector::Zero(n);
      double radius = 0.0;
      if (params.size() == 1) {
        radius = params[0];
      } else if (static_cast<int>(params.size()) == n + 1) {
        for (int i = 0; i < n; ++i) center[i] = params[i];
        radius = params[n];
      } else {
        throw ParameterError("ball: expected {R} or {c_1..c_N, R}");
      }
      require_params(radius > 0.0, "ball: radius must be positive");
      s.contains = [center, radius](const Vector& x) { return (x - center).norm() <= radius; };
      s.distance_lb = [center, radius](const Vector& x) {
        return std::max(0.0, (x - center).norm() - radius);
      };
      s.outer_radius = center.norm() + radius;
      return s;
    }
    case ShapeKind::AxisRay: {
      require_params(params.size() == 1 || params.size() == 2,
                     "axis_ray: expected {start} or {start, delta}");
      const double start = params[0];
      const double delta = params.size() == 2 ? params[1] : 1e-3;
      require_params(delta > 0.0, "axis_ray: delta must be positive");
      s.params = {start, delta};
      s.contains = [start, delta](const Vector& x) {
        return x[0] >= start && tail_norm(x) <= delta;
      };
      s.distance_lb = [start, delta](const Vector& x) { return tube_distance(x, start, delta); };
      s.thickness = delta;
      return s;
    }
    case ShapeKind::SolidCylinder: {
      require_params(params.size() == 2, "solid_cylinder: expected {radius, start}");
      const double radius = params[0];
      const double start = params[1];
      require_params(radius > 0.0, "solid_cylinder: radius must be positive");
      s.contains = [start, radius](const Vector& x) {
        return x[0] >= start && tail_norm(x) <= radius;
      };
      s.distance_lb = [start, radius](const Vector& x) { return tube_distance(x, start, radius); };
      return s;
    }
    case ShapeKind::PowerThorn: {
      require_params(params.size() == 1, "power_thorn: expected {alpha}");
      const double alpha = params[0];
      require_params(alpha > 0.0 && alpha <= 1.0, "power_thorn: need 0 < alpha <= 1");
      s.contains = [alpha](const Vector& x) {
        return x[0] >= 1.0 && tail_norm(x) <= std::pow(x[0], alpha);
      };
      // The profile x_1^alpha has slope <= alpha on x_1 >= 1, so the vertical
      // gap shrunk by sqrt(1 + alpha^2) is a valid distance bound there.
      const double lip = std::sqrt(1.0 + alpha * alpha);
      s.distance_lb = [alpha, lip](const Vector& x) {
        const double axial = 1.0 - x[0];
        if (axial <= 0.0) {
          return std::max(0.0, (tail_norm(x) - std::pow(x[0], alpha)) / lip);
        }
        const double trans = std::max(0.0, (tail_norm(x) - 1.0) / lip);
        return std::hypot(axial, trans);
      };
      return s;
    }
    case ShapeKind::DyadicBallUnion: {
      require_params(params.size() == 2, "dyadic_ball_union: expected {growth, scale}");
      const double growth = params[0];
      const double scale = params[1];
      require_params(scale > 0.0, "dyadic_ball_union: scale must be positive");
      require_params(growth <= 0.9, "dyadic_ball_union: growth must stay below 0.9");
      auto ball_radius = [growth, scale](int k) { return scale * std::pow(2.0, growth * k); };
      // Ball k sits at 2^k e_1; only a 2-3 octave window around |x| can be
      // close, plus ball 1 for points near the origin.
      auto window = [](const Vector& x) {
        const double r = std::max(1.0, x.norm());
        const int mid = static_cast<int>(std::floor(std::log2(r)));
        return std::pair<int, int>{std::max(1, mid - 2), mid + 3};
      };
      s.contains = [ball_radius, window, n](const Vector& x) {
        auto [k0, k1] = window(x);
        Vector shifted(n);
        for (int k = k0; k <= k1; ++k) {
          shifted = x;
          shifted[0] -= std::pow(2.0, k);
          if (shifted.norm() <= ball_radius(k)) return true;
        }
        return false;
      };
      s.distance_lb = [ball_radius, window, n](const Vector& x) {
        auto [k0, k1] = window(x);
        double best = kInfinity;
        Vector shifted(n);
        for (int k = k0; k <= k1; ++k) {
          shifted = x;
          shifted[0] -= std::pow(2.0, k);
          best = std::min(best, shifted.norm() - ball_radius(k));
        }
        // Balls outside the window: their centers differ from |x| by at least
        // a factor of 4, so |x - 2^k e_1| - r_k >= 2^k - |x| - r_k (k above)
        // or |x| - 2^k - r_k (k below); both exceed the window minimum.
        return std::max(0.0, best);
      };
      return s;
    }
    case ShapeKind::ComplementOfBall: {
      require_params(params.size() == 1, "complement_of_ball: expected {R}");
      const double radius = params[0];
      require_params(radius > 0.0, "complement_of_ball: radius must be positive");
      s.contains = [radius](const Vector& x) { return x.norm() >= radius; };
      s.distance_lb = [radius](const Vector& x) { return std::max(0.0, radius - x.norm()); };
      return s;
    }
    case ShapeKind::Union:
      throw ParameterError("union: build with make_union()");
    default:
      throw ParameterError("make_canonical: not a canonical kind");
  }
}

SetSpec make_union(const std::vector<SetSpec>& parts) {
  require_params(!parts.empty(), "union: needs at least one part");
  const int n = parts.front().dimension;
  for (const auto& p : parts)
    require_params(p.dimension == n, "union: mixed dimensions");
  SetSpec s;
  s.dimension = n;
  s.kind = ShapeKind::Union;
  s.contains = [parts](const Vector& x) {
    for (const auto& p : parts)
      if (p.contains(x)) return true;
    return false;
  };
  s.distance_lb = [parts](const Vector& x) {
    double best = kInfinity;
    for (const auto& p : parts) best = std::min(best, p.distance_lb(x));
    return best;
  };
  double outer = 0.0;
  bool bounded = true;
  double thickness = kInfinity;
  for (const auto& p : parts) {
    bounded = bounded && p.outer_radius.has_value();
    if (p.outer_radius) outer = std::max(outer, *p.outer_radius);
    thickness = std::min(thickness, p.thickness);
  }
  if (bounded) s.outer_radius = outer;
  s.thickness = thickness;
  return s;
}

SetSpec parse_shape(const std::string& text, int dimension) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  std::vector<double> params;
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      try {
        params.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ParameterError("shape '" + text + "': bad number '" + item + "'");
      }
    }
  }
  static const std::vector<std::pair<std::string, ShapeKind>> kinds = {
      {"empty", ShapeKind::Empty},
      {"ball", ShapeKind::Ball},
      {"axis_ray", ShapeKind::AxisRay},
      {"solid_cylinder", ShapeKind::SolidCylinder},
      {"power_thorn", ShapeKind::PowerThorn},
      {"dyadic_ball_union", ShapeKind::DyadicBallUnion},
      {"complement_of_ball", ShapeKind::ComplementOfBall},
  };
  for (const auto& [key, kind] : kinds) {
    if (key == name) {
      if (kind == ShapeKind::Ball && params.empty()) params = {1.0};
      return make_canonical(kind, params, dimension);
    }
  }
  throw ParameterError("unknown shape kind '" + name + "'");
}

SetSpec annulus_restriction(const SetSpec& set, double r_lo, double r_hi) {
  require_params(0.0 <= r_lo && r_lo < r_hi, "annulus restriction: need 0 <= r_lo < r_hi");
  SetSpec s;
  s.dimension = set.dimension;
  s.kind = ShapeKind::ShellRestriction;
  s.params = {r_lo, r_hi};
  auto base_contains = set.contains;
  auto base_distance = set.distance_lb;
  s.contains = [base_contains, r_lo, r_hi](const Vector& x) {
    const double r = x.norm();
    return r >= r_lo && r <= r_hi && base_contains(x);
  };
  // The restriction is contained in both the set and the annulus, so the
  // larger of the two distances is still a lower bound.
  s.distance_lb = [base_distance, r_lo, r_hi](const Vector& x) {
    const double r = x.norm();
    const double d_annulus = std::max(0.0, std::max(r_lo - r, r - r_hi));
    return std::max(base_distance(x), d_annulus);
  };
  s.outer_radius = set.outer_radius ? std::min(*set.outer_radius, r_hi) : r_hi;
  if (set.empty() || (set.outer_radius && *set.outer_radius < r_lo)) s.outer_radius = 0.0;
  s.thickness = set.thickness;
  return s;
}

ShellRegion shell(const SetSpec& set, int index) {
  if (index < 1) throw ParameterError("shell: index must be >= 1");
  ShellRegion region;
  region.index = index;
  region.inner_radius = std::pow(2.0, index - 1);
  region.outer_radius = std::pow(2.0, index);
  region.restricted = annulus_restriction(set, region.inner_radius, region.outer_radius);
  return region;
}

SetSpec radial_truncation(const SetSpec& set, double rho) {
  require_params(rho > 0.0, "radial_truncation: rho must be positive");
  SetSpec s = annulus_restriction(set, 0.0, rho);
  s.kind = ShapeKind::RadialTruncation;
  s.params = {rho};
  return s;
}

SetSpec rescale(const SetSpec& set, double scale) {
  require_params(scale > 0.0, "rescale: scale must be positive");
  SetSpec s;
  s.dimension = set.dimension;
  s.kind = ShapeKind::Rescaled;
  s.params = {scale};
  auto base_contains = set.contains;
  auto base_distance = set.distance_lb;
  const int n = set.dimension;
  s.contains = [base_contains, scale, n](const Vector& x) {
    Vector y = scale * x;
    return base_contains(y);
  };
  s.distance_lb = [base_distance, scale, n](const Vector& x) {
    Vector y = scale * x;
    return base_distance(y) / scale;
  };
  if (set.outer_radius) s.outer_radius = *set.outer_radius / scale;
  s.thickness = set.thickness / scale;
  return s;
}

std::vector<Vector> sample_region(const ShellRegion& region, int count, std::uint64_t seed,
                                  int max_attempts_per_point) {
  if (count < 1) throw ParameterError("sample_region: count must be >= 1");
  if (region.restricted.empty())
    throw EmptyRegionError("sample_region: region is empty (shell " +
                           std::to_string(region.index) + ")");
  std::vector<Vector> points;
  points.reserve(count);
  RandomEngine eng = make_engine(seed, 0x5a5a5a5aULL + region.index);
  Vector candidate(region.restricted.dimension);
  long long attempts = 0;
  const long long cap = static_cast<long long>(max_attempts_per_point) * count;
  while (static_cast<int>(points.size()) < count) {
    if (++attempts > cap)
      throw EmptyRegionError("sample_region: acceptance rate below 1/" +
                             std::to_string(max_attempts_per_point));
    sample_annulus_point(eng, region.inner_radius, region.outer_radius, candidate);
    if (region.restricted.contains(candidate)) points.push_back(candidate);
  }
  return points;
}

}  // namespace capinf
