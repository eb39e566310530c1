#include "rsrl/rng.hpp"

#include <algorithm>

namespace rsrl {

std::uint64_t CounterRng::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// stream 0 reproduces the reference SplitMix64 sequence for `seed`
CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(stream == 0 ? seed : mix(seed ^ mix(stream * kGolden))) {}

std::uint64_t CounterRng::next_u64() {
  ++counter_;
  return mix(key_ + counter_ * kGolden);
}

double CounterRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t CounterRng::below(std::uint64_t n) {
  auto i = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  return std::min(i, n - 1);
}

}  // namespace rsrl
