#include "govlab/simulation/metrics.hpp"

#include <algorithm>
#include <vector>

namespace govlab::sim {

  Ratio gini(std::span<const VotingPower> powers) {
    std::vector<std::uint64_t> xs;
    xs.reserve(powers.size());
    u128 sum = 0;
    for (auto p : powers) {
      xs.push_back(p.units());
      sum += p.units();
    }
    if (sum == 0) {
      throw Error(Errc::kInvalidArgument, "gini of an empty or all-zero distribution");
    }
    std::sort(xs.begin(), xs.end());
    // sum_i sum_j |x_i - x_j| = 2 * sum_k (2k - n + 1) x_(k) over ascending x;
    // the 2 cancels against the 2 in the denominator.
    const auto n = static_cast<__int128>(xs.size());
    __int128 weighted = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      weighted += (2 * static_cast<__int128>(k) - n + 1) * static_cast<__int128>(xs[k]);
    }
    u128 num = mul_checked(static_cast<u128>(weighted), kScale);
    u128 den = mul_checked(static_cast<u128>(n), sum);
    return Ratio::from_units(narrow_u64(div_round_half_even(num, den)));
  }

  std::optional<std::uint64_t> min_controlling_set(std::span<const VotingPower> powers) {
    std::vector<std::uint64_t> xs;
    u128 total = 0;
    for (auto p : powers) {
      xs.push_back(p.units());
      total += p.units();
    }
    if (total == 0) {
      return std::nullopt;
    }
    std::sort(xs.rbegin(), xs.rend());
    u128 acc = 0;
    std::uint64_t count = 0;
    for (auto x : xs) {
      acc += x;
      ++count;
      if (2 * acc > total) {
        break;
      }
    }
    return count;
  }

}  // namespace govlab::sim
