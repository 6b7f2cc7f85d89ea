#pragma once

#include <cmath>
#include <cstdint>

namespace gkbm {

/// Finalizer of the SplitMix64 generator; also used to derive substream keys.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Counter-based 64-bit generator (SplitMix64). The state is a counter
/// advanced by the golden-ratio increment; every output is mix64(counter),
/// so streams are cheap to fork and results do not depend on call order
/// across streams. Output bits are identical on every platform.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t key) : state_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ull; }

  result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

// Stream tags. Every source of randomness in the project draws from
// substream(seed, tag, ...), never from a shared generator, so sampling is
// deterministic under any parallel schedule.
namespace stream {
inline constexpr std::uint64_t node_count = 1;
inline constexpr std::uint64_t locations = 2;
inline constexpr std::uint64_t communities = 3;
inline constexpr std::uint64_t edges = 4;  // + (block_i, block_j)
inline constexpr std::uint64_t experiment = 5;
inline constexpr std::uint64_t poisson_test = 6;
}  // namespace stream

/// Derives an independent generator for (seed, a, b, c) by chaining mix64.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t a,
                            std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t key = mix64(seed ^ 0x6A09E667F3BCC909ull);
  key = mix64(key ^ mix64(a));
  key = mix64(key ^ mix64(b ^ 0x9E3779B97F4A7C15ull));
  key = mix64(key ^ mix64(c ^ 0x3C6EF372FE94F82Bull));
  return SplitMix64(key);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(SplitMix64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(SplitMix64& g, double prob) {
  return uniform01(g) < prob;
}

/// Exp(1) variate. 1 - U is in (0, 1], so the log never sees zero.
inline double exponential(SplitMix64& g) {
  return -std::log(1.0 - uniform01(g));
}

/// Poisson variate by counting unit-exponential arrivals in [0, mean].
/// Exact for every mean (no normal approximation, no underflow); cost is
/// O(mean) draws, which is fine at the scales used here.
inline std::int64_t poisson(SplitMix64& g, double mean) {
  if (!(mean > 0.0)) return 0;
  std::int64_t count = 0;
  double t = exponential(g);
  while (t <= mean) {
    ++count;
    t += exponential(g);
  }
  return count;
}

}  // namespace gkbm
