#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace rydsim {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the RNG stream for one shot of one scan point:
///   splitmix64(splitmix64(splitmix64(seed) ^ grid_index) ^ shot_index)
/// Distinct (grid_index, shot_index) pairs give distinct streams, and the result
/// depends on nothing but the three arguments.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t shot_index,
                                    std::uint64_t grid_index = 0) {
  return splitmix64(splitmix64(splitmix64(seed) ^ grid_index) ^ shot_index);
}

/// Per-trajectory random stream. Draws are built from raw engine bits so the
/// sequence is identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Exponential waiting time; +inf for a zero rate.
  double exponential(double rate) {
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return -std::log1p(-uniform()) / rate;
  }

  /// Uniform index in [0, n).
  std::size_t index(std::size_t n) {
    auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rydsim
