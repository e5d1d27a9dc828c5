#pragma once

#include <cstdint>
#include <limits>

namespace mlexist {

/// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream. Stream `index` under master seed `seed` has
/// key = mix64(seed + G * (index + 1)) and its j-th output (j = 0, 1, ...)
/// is mix64(key + G * (j + 1)), with G = 0x9e3779b97f4a7c15. Outputs are a
/// pure function of (seed, index, j), so replicate i always sees the same
/// numbers regardless of scheduling.
class RandomStream {
 public:
  using result_type = std::uint64_t;
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  RandomStream(std::uint64_t seed, std::uint64_t index) noexcept
      : state_(mix64(seed + kGolden * (index + 1))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    state_ += kGolden;
    return mix64(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform on {0, ..., bound - 1}; bound > 0. Lemire's method.
  std::uint64_t below(std::uint64_t bound) noexcept {
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

 private:
  std::uint64_t state_;
};

}  // namespace mlexist
