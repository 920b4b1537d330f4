#pragma once

#include <optional>
#include <span>

#include "govlab/core/types.hpp"

namespace govlab::sim {

  /// Gini coefficient sum_i sum_j |x_i - x_j| / (2 n sum x), computed exactly
  /// on integer units and rounded half-even to nine digits. Throws
  /// kInvalidArgument when the input is empty or all zero.
  Ratio gini(std::span<const VotingPower> powers);

  /// Smallest number of voters whose combined power is strictly more than
  /// half the total, by descending greedy accumulation. Empty when the total
  /// is zero.
  std::optional<std::uint64_t> min_controlling_set(std::span<const VotingPower> powers);

}  // namespace govlab::sim
