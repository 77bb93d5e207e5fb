#pragma once

#include "capinf/common.hpp"

#include <cstdint>
#include <random>

namespace capinf {

/// splitmix64 step; used to derive independent per-stream seeds from a
/// (seed, stream index) pair so results do not depend on worker count.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic stream seed for path/stage `index` under master `seed`.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  return a ^ (b << 1);
}

using RandomEngine = std::mt19937_64;

inline RandomEngine make_engine(std::uint64_t seed, std::uint64_t index) {
  return RandomEngine(stream_seed(seed, index));
}

/// Uniform direction on S^{N-1}, written into `out` (size N).
inline void sample_unit_direction(RandomEngine& eng, Vector& out) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      out[i] = gauss(eng);
      norm2 += out[i] * out[i];
    }
  } while (norm2 < 1e-300);
  out /= std::sqrt(norm2);
}

/// Uniform point in the spherical annulus r_lo <= |x| <= r_hi.
inline void sample_annulus_point(RandomEngine& eng, double r_lo, double r_hi, Vector& out) {
  const int n = static_cast<int>(out.size());
  sample_unit_direction(eng, out);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double a = std::pow(r_lo, n);
  const double b = std::pow(r_hi, n);
  out *= std::pow(a + uni(eng) * (b - a), 1.0 / n);
}

}  // namespace capinf
