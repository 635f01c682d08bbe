#pragma once

#include <cstdint>
#include <limits>

namespace clickstat {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: the k-th output of stream (seed, id) is
/// mix64(key + (k + 1) * gamma) with key derived from (seed, id).  Streams
/// are addressed directly, so any worker can produce any chunk's numbers
/// without coordinating with the others.  Satisfies
/// UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(mix64(mix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    counter_ += kGamma;
    return mix64(key_ + counter_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Binomial(n, p) draw with q = 1 - p supplied separately.  Inverts the CDF
/// from whichever tail is lighter, so the expected cost is O(1 + n min(p, q)).
std::int64_t sample_binomial(std::int64_t n, double p, double q, CounterRng& rng);

/// sample_binomial with the per-call setup hoisted out, for repeated draws
/// at one fixed (n, p).  Produces the same values as sample_binomial for
/// the same generator state.
class BinomialSampler {
 public:
  BinomialSampler(std::int64_t n, double p, double q);

  std::int64_t operator()(CounterRng& rng) const;

 private:
  std::int64_t n_;
  bool flipped_;      // sampling failures instead of successes
  double light_ = 0;  // success probability of the sampled tail
  double ratio_ = 0;
  double pmf0_ = 0;
  bool fallback_ = false;
};

/// O(n) reference: one Bernoulli draw per trial.
std::int64_t sample_bernoulli_sum(std::int64_t n, double p, double q, CounterRng& rng);

}  // namespace clickstat
