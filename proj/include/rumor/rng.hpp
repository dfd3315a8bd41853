#pragma once

#include <cstdint>
#include <iterator>
#include <random>
#include <utility>

namespace rumor {

using RngSeed = std::uint64_t;

// Seeded 64-bit Mersenne Twister with platform-independent derived draws.
// std::uniform_real_distribution and std::shuffle are implementation-defined,
// so every conversion used by the simulator lives here.
class Rng {
 public:
  explicit Rng(RngSeed seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, bound), bound > 0. Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  // Fisher-Yates.
  template <std::random_access_iterator It>
  void shuffle(It first, It last) {
    const auto count = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = count; i > 1; --i) {
      const auto j = below(i);
      using std::swap;
      swap(first[i - 1], first[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rumor
