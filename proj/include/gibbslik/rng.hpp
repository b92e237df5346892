#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>

namespace gibbslik {

// SplitMix64 finalizer. Full-avalanche mix of a 64-bit word.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-mode generator: every draw is a pure function of
// (seed, stream, counter). Streams keyed by (chain, step) make parallel
// chains bit-reproducible regardless of thread scheduling, and the same
// seed always replays the same run. Not for cryptographic use.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix64(seed ^ mix64(stream + 0x51ed2701a9e5c33bULL))) {}

  // Stream key derived from a (chain, step) pair.
  Rng(std::uint64_t seed, std::uint64_t chain, std::uint64_t step)
      : Rng(seed, mix64(chain) ^ (step * 0xda942042e4dd58b5ULL + 1)) {}

  std::uint64_t next_u64() { return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Index uniform on {0, ..., n-1}; n > 0.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

  // Knuth's product method, with recursive halving for large means so the
  // partial product never underflows. Exact distribution, O(mean) uniforms.
  long poisson(double mean) {
    long total = 0;
    while (mean > 32.0) {
      double half = mean * 0.5;
      total += poisson_small(half);
      mean -= half;
    }
    return total + poisson_small(mean);
  }

 private:
  long poisson_small(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    long k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace gibbslik
