#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace mlc {

/// Deterministic random source for generators and property suites. Draws go
/// through explicit helpers (not std distributions) so that a seed fixes the
/// outcome on every platform.
struct Rng {
  std::mt19937_64 gen;

  explicit Rng(std::uint64_t seed) : gen(seed) {}

  std::uint64_t next() { return gen(); }
  std::size_t below(std::size_t k) { return k == 0 ? 0 : static_cast<std::size_t>(gen() % k); }
  std::size_t range(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  bool chance(unsigned pct) { return below(100) < pct; }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }
};

/// Derives the per-instance seed for instance i of a suite (splitmix64 step).
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t i) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (i + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

} // namespace mlc
