#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "govlab/core/rng.hpp"
#include "govlab/core/types.hpp"

namespace govlab {

  enum class RegistryMode {
    /// At most one wallet per identity.
    kStrictOneWallet,
    /// Many wallets per identity; their votes merge before power is applied.
    kCollapsePerIdentity,
  };

  std::string_view registry_mode_name(RegistryMode m) noexcept;
  RegistryMode parse_registry_mode(std::string_view name);

  enum class UnverifiedPolicy { kDropUnverified, kAdmitUnverified };

  std::string_view policy_name(UnverifiedPolicy p) noexcept;
  UnverifiedPolicy parse_policy(std::string_view name);

  enum class RejectReason { kDuplicateIdentity, kWalletAlreadyBound, kProviderRejected };

  std::string_view reject_reason_name(RejectReason r) noexcept;

  struct VerificationOutcome {
    WalletId wallet;
    IdentityId identity;
    bool accepted = false;
    /// Set iff !accepted.
    std::optional<RejectReason> reason;
  };

  /// An identity claim presented to the verification provider. Genuine
  /// claims come from a real person's first wallet; fraudulent ones are a
  /// Sybil attacker's fabricated identities.
  struct IdentityClaim {
    IdentityId identity;
    WalletId wallet;
    bool genuine = true;
  };

  struct ProviderParams {
    /// Probability that a fraudulent claim is wrongly accepted.
    double false_accept_rate = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
  };

  /// Stand-in for an external verification service (an ID.me-like KYC check).
  /// Genuine claims always pass; each fraudulent claim consumes one draw of
  /// the seeded stream and passes iff draw < false_accept_rate.
  class SimulatedProvider {
   public:
    explicit SimulatedProvider(ProviderParams params);

    bool verify(const IdentityClaim &claim);

   private:
    ProviderParams params_;
    Xoshiro256ss rng_;
  };

  class IdentityRegistry {
   public:
    explicit IdentityRegistry(RegistryMode mode = RegistryMode::kStrictOneWallet)
        : mode_(mode) {}

    RegistryMode mode() const {
      return mode_;
    }

    VerificationOutcome bind(const IdentityId &identity, const WalletId &wallet);

    /// Runs the claim past the provider first; a provider rejection leaves
    /// the registry untouched.
    VerificationOutcome bind_verified(const IdentityClaim &claim,
                                      SimulatedProvider &provider);

    std::optional<IdentityId> identity_of(const WalletId &wallet) const;
    const std::set<WalletId> &wallets_of(const IdentityId &identity) const;

    const std::map<IdentityId, std::set<WalletId>> &bindings() const {
      return bindings_;
    }

    std::size_t wallet_count() const {
      return owner_.size();
    }

    /// Checks the mode's invariants; throws kInvalidArgument on violation.
    void check_invariants() const;

   private:
    RegistryMode mode_;
    std::map<IdentityId, std::set<WalletId>> bindings_;
    std::map<WalletId, IdentityId> owner_;
  };

  void to_json(nlohmann::json &j, const IdentityRegistry &r);
  /// Rebuilds through bind(); any rejected binding makes the import fail.
  IdentityRegistry registry_from_json(const nlohmann::json &j);

  struct FilterResult {
    std::vector<VoteRecord> votes;
    std::vector<WalletId> dropped_unverified;
    std::vector<IdentityId> equivocating;
  };

  /// Applies the identity layer to one proposal's votes. Unbound wallets are
  /// dropped or passed through per policy. Bound wallets group by identity:
  /// an identity voting for more than one option loses every vote; otherwise
  /// its votes merge into one record (smallest wallet id, exact token sum,
  /// latest cast tick) so power is applied once to the merged total.
  /// Output is ordered by wallet id; applying the filter twice is a no-op.
  FilterResult filter_and_collapse(std::span<const VoteRecord> votes,
                                   const IdentityRegistry &registry,
                                   UnverifiedPolicy policy);

}  // namespace govlab
