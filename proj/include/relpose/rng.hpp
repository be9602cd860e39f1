#pragma once

#include <cstdint>
#include <initializer_list>

#include "relpose/types.hpp"

namespace relpose {

/// Counter-based pseudo random generator (splitmix64 over an incrementing
/// counter). Output is identical on every platform for a given seed, which
/// keeps experiment seeds reproducible independent of compiler and libc.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform double in [-half_width, half_width].
  double symmetric(double half_width) { return uniform(-half_width, half_width); }

  /// Standard normal deviate (Box-Muller, fixed two draws per call).
  double gaussian();

  /// Uniformly distributed direction on the unit sphere.
  Vec3 unit_vector();

  /// Uniformly distributed rotation (Shoemake quaternion method).
  Mat3 rotation();

  /// Derives an independent stream seed from a base seed and an index path,
  /// e.g. derive(base, {grid_index, trial_index}).
  static std::uint64_t derive(std::uint64_t base, std::initializer_list<std::uint64_t> path);

 private:
  std::uint64_t state_;
};

}  // namespace relpose
