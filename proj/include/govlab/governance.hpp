#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "govlab/identity.hpp"
#include "govlab/ledger.hpp"
#include "govlab/mechanisms.hpp"

namespace govlab {

  enum class Phase {
    kDraft,
    kDiscussion,
    kVoting,
    kPassed,
    kRejected,
    kQuorumFailed,
    kExecuted,
  };

  std::string_view phase_name(Phase p) noexcept;
  Phase parse_phase(std::string_view name);

  /// True iff from -> to is one of the lifecycle edges
  /// Draft->Discussion->Voting->{Passed,Rejected,QuorumFailed}, Passed->Executed.
  bool is_allowed_transition(Phase from, Phase to) noexcept;

  bool is_terminal(Phase p) noexcept;

  /// Half-open tick interval [begin, end).
  struct Window {
    Tick begin = 0;
    Tick end = 0;

    bool contains(Tick t) const {
      return t >= begin && t < end;
    }
    bool operator==(const Window &) const = default;
  };

  /// Static description of a proposal. The first option is the "approve"
  /// option: the proposal passes only if it wins outright.
  struct ProposalSpec {
    ProposalId id;
    std::vector<OptionLabel> options;
    Window discussion;
    Window voting;
    Mechanism mechanism = Mechanism::kToken;
    std::optional<QuorumConfig> quorum;

    /// Throws kInvalidArgument describing the first problem found.
    void validate() const;
    bool operator==(const ProposalSpec &) const = default;
  };

  void to_json(nlohmann::json &j, const ProposalSpec &p);
  void from_json(const nlohmann::json &j, ProposalSpec &p);

  struct Proposal {
    ProposalSpec spec;
    Phase phase = Phase::kDraft;
    /// Live votes, one per wallet.
    std::map<WalletId, VoteRecord> votes;
    std::optional<TallyResult> result;
    /// Identity-layer side effects at finalize time.
    std::optional<FilterResult> filtered;
  };

  struct IdentityConfig {
    RegistryMode mode = RegistryMode::kStrictOneWallet;
    UnverifiedPolicy policy = UnverifiedPolicy::kDropUnverified;

    bool operator==(const IdentityConfig &) const = default;
  };

  struct EngineConfig {
    TokenAmount supply;
    ConvictionParams conviction;
    /// When set, finalize runs votes through filter_and_collapse first.
    std::optional<IdentityConfig> identity;
  };

  /// Governance state for a set of proposals sharing one token supply and
  /// one audit ledger. Every state-changing call appends exactly one ledger
  /// event; calls must arrive in non-decreasing tick order.
  class Engine {
   public:
    /// Appends the genesis event.
    explicit Engine(EngineConfig config);

    /// Declares a wallet's holding. Total holdings may not exceed supply.
    void set_balance(const WalletId &wallet, TokenAmount balance);

    /// Registers an identity binding (requires an identity layer). The
    /// outcome is logged whether or not it was accepted.
    VerificationOutcome bind(const IdentityClaim &claim, SimulatedProvider &provider);

    const Proposal &submit(const ProposalSpec &spec, Tick now);
    const Proposal &open_voting(const ProposalId &id, Tick now);
    const Proposal &cast(const VoteRecord &vote, Tick now);
    const Proposal &finalize(const ProposalId &id, Tick now);
    const Proposal &execute(const ProposalId &id, Tick now);

    /// Opens every Discussion proposal whose voting window has begun and
    /// finalizes every Voting proposal whose window has ended.
    void advance_to(Tick now);

    const Proposal &proposal(const ProposalId &id) const;
    const std::map<ProposalId, Proposal> &proposals() const {
      return proposals_;
    }

    TokenAmount balance(const WalletId &wallet) const;
    TokenAmount locked(const WalletId &wallet) const;
    const std::map<WalletId, TokenAmount> &balances() const {
      return balances_;
    }

    const EngineConfig &config() const {
      return config_;
    }
    const IdentityRegistry &registry() const {
      return registry_;
    }
    const Ledger &ledger() const {
      return ledger_;
    }

    /// Rebuilds an engine by re-applying every event of a log in order.
    /// Throws if the log does not start with genesis or if a recorded
    /// outcome disagrees with the recomputed one.
    static Engine replay(std::span<const LedgerEntry> entries);

   private:
    Proposal &find(const ProposalId &id);
    void observe_tick(Tick now);
    void transition(Proposal &p, Phase to);
    void apply_binding(const VerificationOutcome &outcome);

    EngineConfig config_;
    IdentityRegistry registry_;
    Ledger ledger_;
    std::map<ProposalId, Proposal> proposals_;
    std::map<WalletId, TokenAmount> balances_;
    /// wallet -> proposal -> locked amount
    std::map<WalletId, std::map<ProposalId, TokenAmount>> locks_;
    TokenAmount declared_;
    Tick last_tick_ = 0;
  };

}  // namespace govlab
