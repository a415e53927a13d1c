#pragma once

#include <cstdint>
#include <random>

namespace sgcgen {

// splitmix64 finalizer; used for seed expansion and sub-stream derivation.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent sub-stream seed from a base seed and up to three
/// stream tags. Parallel samplers give every logical unit of work (an SBM
/// block, a candidate K, a sweep cell) its own tag tuple so that results do
/// not depend on scheduling order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
  h = mix64(h ^ (a + 0x9e3779b97f4a7c15ULL));
  h = mix64(h ^ (b + 0x3c6ef372fe94f82aULL));
  h = mix64(h ^ (c + 0x78dde6e5fd29f05bULL));
  return h;
}

/// Seedable deterministic generator (std::mt19937_64 core with explicit
/// uniform conversions, so draws are identical across standard libraries).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1); safe as a log() argument.
  double uniform_open() {
    return (static_cast<double>(next() >> 12) + 0.5) * 0x1.0p-52;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

private:
  std::mt19937_64 gen_;
};

}  // namespace sgcgen
