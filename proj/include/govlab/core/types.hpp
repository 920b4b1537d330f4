#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "govlab/core/fixed.hpp"

namespace govlab {

  /// Simulation time unit.
  using Tick = std::uint64_t;

  inline constexpr std::size_t kMaxIdLength = 64;

  /// True when text is a legal identifier: 1..64 chars of [A-Za-z0-9_-].
  bool is_valid_id(std::string_view text) noexcept;

  /// Opaque identifier; compared byte-exact, never normalized.
  template <class Tag>
  class Id {
   public:
    Id() = default;

    explicit Id(std::string value) : value_(std::move(value)) {
      if (!is_valid_id(value_)) {
        throw Error(Errc::kInvalidArgument,
                    "invalid identifier '" + value_
                        + "': need 1-64 chars of [A-Za-z0-9_-]");
      }
    }

    const std::string &str() const {
      return value_;
    }

    auto operator<=>(const Id &) const = default;

   private:
    std::string value_;
  };

  struct WalletTag {};
  struct IdentityTag {};
  struct ProposalTag {};

  using WalletId = Id<WalletTag>;
  using IdentityId = Id<IdentityTag>;
  using ProposalId = Id<ProposalTag>;

  template <class Tag>
  void to_json(nlohmann::json &j, const Id<Tag> &id) {
    j = id.str();
  }

  template <class Tag>
  void from_json(const nlohmann::json &j, Id<Tag> &id) {
    if (!j.is_string()) {
      throw Error(Errc::kParse, "identifier must be a string, got " + j.dump());
    }
    id = Id<Tag>(j.get<std::string>());
  }

  using OptionLabel = std::string;

  struct VoteRecord {
    WalletId wallet;
    ProposalId proposal;
    OptionLabel option;
    TokenAmount committed;
    /// For conviction voting this is the tick the current option was first
    /// held, so it doubles as held_since.
    Tick cast_at = 0;

    bool operator==(const VoteRecord &) const = default;
  };

  /// Throws kZeroCommitment / kInvalidArgument for malformed records.
  void validate_vote(const VoteRecord &vote);

  void to_json(nlohmann::json &j, const VoteRecord &v);
  void from_json(const nlohmann::json &j, VoteRecord &v);

  enum class OutcomeKind { kWinner, kTie, kQuorumFailed };

  struct TallyResult {
    std::map<OptionLabel, VotingPower> per_option_power;
    TokenAmount participating_tokens;
    std::uint64_t participating_wallets = 0;
    OutcomeKind outcome = OutcomeKind::kTie;
    /// Set when outcome is kWinner.
    std::optional<OptionLabel> winner;
    /// Options sharing the maximal power when outcome is kTie.
    std::vector<OptionLabel> tied;

    VotingPower total_power() const;

    bool operator==(const TallyResult &) const = default;
  };

  std::string_view outcome_name(OutcomeKind kind) noexcept;

  void to_json(nlohmann::json &j, const TallyResult &t);
  void from_json(const nlohmann::json &j, TallyResult &t);

  /// Exact, order-independent sum; throws kOverflow past the fixed range.
  VotingPower power_sum(std::span<const VotingPower> powers);

}  // namespace govlab
