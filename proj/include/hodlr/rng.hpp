#pragma once

#include <cstdint>
#include <limits>

namespace hodlr {

/// xorshift64* (Vigna 2014), seeded through one round of splitmix64.
///
///   seeding:  s = seed + 0x9E3779B97F4A7C15
///             s = (s ^ (s >> 30)) * 0xBF58476D1CE4E5B9
///             s = (s ^ (s >> 27)) * 0x94D049BB133111EB
///             s =  s ^ (s >> 31)           (s == 0 is replaced by 1)
///   step:     s ^= s >> 12;  s ^= s << 25;  s ^= s >> 27
///             return s * 0x2545F4914F6CDD1D
///   uniform:  u = (next() >> 11) * 2^-53  in [0, 1)
///
/// Small enough to reimplement bit-for-bit in any language.
class Xorshift64Star {
 public:
  using result_type = std::uint64_t;

  explicit Xorshift64Star(std::uint64_t seed) noexcept {
    std::uint64_t s = seed + 0x9E3779B97F4A7C15ULL;
    s = (s ^ (s >> 30)) * 0xBF58476D1CE4E5B9ULL;
    s = (s ^ (s >> 27)) * 0x94D049BB133111EBULL;
    s ^= s >> 31;
    state_ = s ? s : 1;
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform01();
  }

 private:
  std::uint64_t state_;
};

}  // namespace hodlr
