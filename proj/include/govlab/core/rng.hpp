#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace govlab {

  /// splitmix64 step; used to expand a 64-bit seed into xoshiro state.
  std::uint64_t splitmix64(std::uint64_t &state) noexcept;

  /// xoshiro256** (Blackman & Vigna). Update rule, so other implementations
  /// can reproduce the stream:
  ///   out  = rotl(s1 * 5, 7) * 9
  ///   t    = s1 << 17
  ///   s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t; s3 = rotl(s3, 45)
  /// Seeding fills s0..s3 with four successive splitmix64 outputs.
  class Xoshiro256ss {
   public:
    using result_type = std::uint64_t;

    explicit Xoshiro256ss(std::uint64_t seed) noexcept;
    explicit Xoshiro256ss(const std::array<std::uint64_t, 4> &state) noexcept
        : s_(state) {}

    std::uint64_t next() noexcept;

    std::uint64_t operator()() noexcept {
      return next();
    }

    /// Uniform in [0, 1) from the top 53 bits.
    double next_double() noexcept;

    static constexpr result_type min() {
      return 0;
    }
    static constexpr result_type max() {
      return std::numeric_limits<result_type>::max();
    }

   private:
    std::array<std::uint64_t, 4> s_;
  };

}  // namespace govlab
