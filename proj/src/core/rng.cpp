#include "govlab/core/rng.hpp"

#include <bit>

namespace govlab {

  std::uint64_t splitmix64(std::uint64_t &state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  Xoshiro256ss::Xoshiro256ss(std::uint64_t seed) noexcept {
    for (auto &word : s_) {
      word = splitmix64(seed);
    }
  }

  std::uint64_t Xoshiro256ss::next() noexcept {
    const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
  }

  double Xoshiro256ss::next_double() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

}  // namespace govlab
