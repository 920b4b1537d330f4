#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "govlab/core/types.hpp"

namespace govlab {

  /// Selector names are a scripting contract: "token", "quorum",
  /// "quadratic", "conviction".
  enum class Mechanism { kToken, kQuorum, kQuadratic, kConviction };

  std::string_view mechanism_name(Mechanism m) noexcept;
  Mechanism parse_mechanism(std::string_view name);

  enum class QuorumBasis { kTokenSupplyFraction, kWalletCountFraction };

  std::string_view quorum_basis_name(QuorumBasis b) noexcept;
  QuorumBasis parse_quorum_basis(std::string_view name);

  struct QuorumConfig {
    QuorumBasis basis = QuorumBasis::kTokenSupplyFraction;
    /// Fraction in [0, 1].
    Ratio threshold;

    void validate() const;
    bool operator==(const QuorumConfig &) const = default;
  };

  void to_json(nlohmann::json &j, const QuorumConfig &q);
  void from_json(const nlohmann::json &j, QuorumConfig &q);

  struct ConvictionParams {
    /// Per-tick decay rate; the exponent is decay_rate * ticks held.
    double decay_rate = 0.1;

    void validate() const;
    bool operator==(const ConvictionParams &) const = default;
  };

  /// Shortest round-trip text of a double ("0.1", "2.5e-05").
  std::string format_real(double v);
  double parse_real(std::string_view text);

  void to_json(nlohmann::json &j, const ConvictionParams &c);
  void from_json(const nlohmann::json &j, ConvictionParams &c);

  struct ConvictionState {
    WalletId wallet;
    OptionLabel option;
    TokenAmount tokens;
    Tick held_since = 0;

    bool operator==(const ConvictionState &) const = default;
  };

  ConvictionState conviction_state(const VoteRecord &vote);

  /// One token, one vote.
  VotingPower power_token(TokenAmount committed);

  /// sqrt(committed), rounded half-even to nine digits. Computed exactly on
  /// integer units, so the result is bit-reproducible.
  VotingPower power_quadratic(TokenAmount committed);

  /// tokens * (1 - exp(-decay_rate * (now - held_since))), half-even at nine
  /// digits. Throws kInvalidArgument when now < held_since.
  VotingPower conviction_power(const ConvictionState &state, Tick now,
                               const ConvictionParams &params);

  /// Moves the commitment to another option; accumulated conviction is lost.
  ConvictionState switch_vote(const ConvictionState &state,
                              const OptionLabel &new_option, Tick now);

  /// Power of a single commitment under mechanism m. held_since and now are
  /// only consulted for conviction.
  VotingPower mechanism_power(Mechanism m, TokenAmount committed,
                              Tick held_since, Tick now,
                              const ConvictionParams &params);

  struct TallyParams {
    Mechanism mechanism = Mechanism::kToken;
    std::optional<QuorumConfig> quorum;
    ConvictionParams conviction;
    /// Declared options. When non-empty every one appears in the result
    /// (with zero power if unvoted) and votes for other labels are rejected.
    std::vector<OptionLabel> options;
  };

  /// Sums per-option power, applies the quorum gate (participation below the
  /// threshold fails; meeting it exactly passes), then picks the unique
  /// strictly-maximal option with positive power or reports a tie.
  TallyResult tally(std::span<const VoteRecord> votes, const TallyParams &params,
                    TokenAmount supply, std::uint64_t wallet_universe_size,
                    Tick now);

  /// The quorum gate on its own.
  bool quorum_met(const QuorumConfig &quorum, TokenAmount participating_tokens,
                  TokenAmount supply, std::uint64_t participating_wallets,
                  std::uint64_t wallet_universe_size);

}  // namespace govlab
