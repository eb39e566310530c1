#pragma once

#include <cstdint>

namespace rsrl {

/// Counter-based 64-bit generator (SplitMix64 output function applied to
/// key + counter * golden-ratio increment).
///
/// A stream is fully determined by (seed, stream id); draw i of a stream is a
/// pure function of those two values and i, so streams can be split without
/// any shared state. The bit sequence is portable: the same seed yields the
/// same u-sequence in any language that implements the mixer below.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();

  /// Uniform double in [0, 1) built from the top 53 bits.
  double uniform();

  /// Uniform integer in [0, n). Uses floor(uniform() * n).
  std::uint64_t below(std::uint64_t n);

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  /// The SplitMix64 finalizer.
  static std::uint64_t mix(std::uint64_t z);

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace rsrl
