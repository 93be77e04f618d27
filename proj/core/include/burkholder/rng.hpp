#pragma once

// Portable seeded random streams. std::mt19937_64 is bit-reproducible across
// standard libraries but the <random> distributions are not, so uniform
// variates are produced here directly from the raw 64-bit output.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace burkholder {

/// One step of SplitMix64.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of the k-th independent stream under a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t k) {
  return splitmix64(splitmix64(master) ^ splitmix64(k + 0x632BE59BD9B4E019ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform on [lo, hi] in log scale.
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  std::uint64_t next() { return engine_(); }
  /// Integer in [lo, hi].
  int integer(int lo, int hi) {
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  /// Angle uniform on [0, 2 pi).
  double angle() { return 2.0 * std::numbers::pi * uniform(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace burkholder
