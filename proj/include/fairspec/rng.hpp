#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fairspec {

/// SplitMix64 finalizer; used to derive independent substream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seeded random stream. The engine is std::mt19937_64, whose output sequence is
/// fixed by the standard. The variates the simulation loop consumes are derived
/// here rather than through <random> distributions, so traces do not depend on
/// the standard library in use.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  /// Independent substream keyed by a path of tags below `seed`.
  static RandomStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1) with 53 bits of resolution.
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform_open() < p; }

  /// UniformRandomBitGenerator access, for <random> distributions used outside
  /// the simulation loop (synthetic model generation).
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Seed of the substream RandomStream::derive(seed, path) would create.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept;

}  // namespace fairspec
