#include "fairspec/rng.hpp"

#include <cassert>

namespace fairspec {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t tag : path) h = mix64(h ^ mix64(tag + 0x632be59bd9b4e019ULL));
  return h;
}

RandomStream RandomStream::derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  return RandomStream(derive_seed(seed, path));
}

std::uint64_t RandomStream::below(std::uint64_t n) {
  assert(n > 0);
  // Reject the low 2^64 mod n values so every residue is equally likely.
  const std::uint64_t limit = (0 - n) % n;
  for (;;) {
    std::uint64_t r = engine_();
    if (r >= limit) return r % n;
  }
}

}  // namespace fairspec
