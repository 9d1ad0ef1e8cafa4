#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace scpa::detail {

// mt19937_64 output is fully specified by the standard, but the standard
// distributions are not; bounded ints, uniforms and gaussians are sampled
// explicitly so the same seed gives the same stream everywhere.

inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

/// Uniform in [lo, hi] inclusive.
inline std::uint64_t uniform_range(std::mt19937_64& rng, std::uint64_t lo,
                                   std::uint64_t hi) {
  return lo + uniform_below(rng, hi - lo + 1);
}

/// Uniform double in [0, 1).
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Box-Muller gaussian, one value per call (the sine twin is kept).
class Gaussian {
 public:
  double next(std::mt19937_64& rng) {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform01(rng);
    } while (u1 <= 0.0);
    const double u2 = uniform01(rng);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Fisher-Yates with explicit bounded sampling.
template <typename T>
void shuffle(std::vector<T>& values, std::mt19937_64& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::swap(values[i - 1], values[uniform_below(rng, i)]);
  }
}

}  // namespace scpa::detail
