// Portable seeded random source.
//
// Uniform bits come from xoshiro256** (Blackman & Vigna) seeded through
// splitmix64; Gaussians use the Marsaglia polar method. Both are fully
// specified here, so a given seed produces the same stream on every platform
// whose libm gives identical log/sqrt results.
#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace dvlfill {

class RandomState {
 public:
  explicit RandomState(std::uint64_t seed = 0);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [0, n). Unbiased (rejection on the top range).
  std::uint64_t below(std::uint64_t n);
  /// Standard normal deviate.
  double gaussian();
  double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }

 private:
  std::array<std::uint64_t, 4> s_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Independent sub-seed for a named stream, e.g. derive_seed(seed, "imu-noise").
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace dvlfill
