#pragma once

#include <cstdint>

namespace evt {

// SplitMix64 (Steele, Lea & Flood 2014). The 64-bit state advances by the
// golden-gamma constant and each output is the state passed through the
// mix13 finalizer:
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
//
// The initial state is the seed itself. uniform() maps the top 53 bits onto
// the open interval (0, 1) as ((z >> 11) + 0.5) * 2^-53, so it never returns
// 0 or 1 and inversion samplers never hit an infinite quantile.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  constexpr double uniform() noexcept {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

}  // namespace evt
