#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "govlab/mechanisms.hpp"

namespace govlab {

  /// Timing for conviction; ignored by the other mechanisms. All attack
  /// wallets share held_since (one coordinated actor casting at once).
  struct SybilTiming {
    Tick held_since = 0;
    Tick now = 0;
    ConvictionParams conviction;
  };

  struct SybilReport {
    VotingPower honest_power;
    VotingPower attack_power;
    /// attack / honest, half-even at nine digits. Empty when honest_power is
    /// zero (conviction evaluated at the cast tick).
    std::optional<Ratio> amplification;

    bool operator==(const SybilReport &) const = default;
  };

  void to_json(nlohmann::json &j, const SybilReport &r);

  /// n balances of floor(total/n) at 1e-9 granularity; the remainder goes to
  /// the first wallet so the balances sum to total exactly.
  std::vector<TokenAmount> split_uniform(TokenAmount total, std::uint64_t n);

  SybilReport sybil_gain(TokenAmount total, std::uint64_t n, Mechanism mechanism,
                         const SybilTiming &timing = {});

  struct BestSplit {
    std::uint64_t n_wallets = 1;
    SybilReport report;
  };

  /// Exhaustive scan of n in [1, max_wallets], further capped so every
  /// wallet holds at least one 1e-9 unit. Ties resolve to the smaller n.
  BestSplit best_split(TokenAmount total, Mechanism mechanism,
                       std::uint64_t max_wallets, const SybilTiming &timing = {});

}  // namespace govlab
