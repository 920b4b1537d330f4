#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "govlab/governance.hpp"

namespace govlab::sim {

  inline constexpr int kSchemaVersion = 1;

  enum class AgentKind { kHonest, kWhale, kSybilAttacker, kAbstainer };

  std::string_view agent_kind_name(AgentKind k) noexcept;

  enum class IdentityStrategy {
    /// Every wallet claims the attacker's real identity.
    kSingleIdentity,
    /// Wallets after the first present fabricated identities, which get
    /// through only on a provider false-accept.
    kFakeIdentities,
  };

  std::string_view identity_strategy_name(IdentityStrategy s) noexcept;

  struct AgentVote {
    ProposalId proposal;
    /// Strict preference order; the agent votes for preference.front().
    std::vector<OptionLabel> preference;
    Tick tick = 0;
    /// Tokens to commit; the whole balance when absent.
    std::optional<TokenAmount> commit;
  };

  struct AgentSpec {
    std::string name;
    AgentKind kind = AgentKind::kHonest;
    TokenAmount balance;
    std::uint64_t n_wallets = 1;
    IdentityStrategy identity_strategy = IdentityStrategy::kSingleIdentity;
    std::vector<AgentVote> votes;
  };

  struct ProposalTemplate {
    ProposalSpec spec;
    /// Scenario-level mechanism/quorum apply unless overridden here.
    std::optional<Mechanism> mechanism;
    std::optional<QuorumConfig> quorum;
    bool execute_on_pass = false;
  };

  struct ScenarioIdentity {
    RegistryMode mode = RegistryMode::kStrictOneWallet;
    UnverifiedPolicy policy = UnverifiedPolicy::kDropUnverified;
    double false_accept_rate = 0.0;
  };

  struct Scenario {
    std::string name;
    std::uint64_t seed = 0;
    Tick ticks = 0;
    TokenAmount supply;
    Mechanism mechanism = Mechanism::kToken;
    std::optional<QuorumConfig> quorum;
    ConvictionParams conviction;
    std::optional<ScenarioIdentity> identity;
    std::vector<ProposalTemplate> proposals;
    std::vector<AgentSpec> agents;

    /// Proposal spec with scenario defaults applied.
    ProposalSpec resolved(const ProposalTemplate &t) const;
    const AgentSpec *find_agent(std::string_view name) const;
  };

  /// Raised with every problem found, not just the first.
  class ValidationError : public Error {
   public:
    explicit ValidationError(std::vector<std::string> problems);

    const std::vector<std::string> &problems() const {
      return problems_;
    }

   private:
    std::vector<std::string> problems_;
  };

  /// Parses and validates a schema_version 1 document.
  Scenario parse_scenario(const nlohmann::json &doc);
  Scenario load_scenario(const std::filesystem::path &path);

  /// Semantic checks on an already-built scenario; empty when valid.
  std::vector<std::string> validate(const Scenario &s);

  /// Copy with every proposal forced onto mechanism m; throws
  /// ValidationError if the result is invalid (e.g. quorum without config).
  Scenario with_mechanism(const Scenario &s, Mechanism m);

  /// Wallet ids an agent controls: the agent name for single-wallet agents,
  /// name-w00..name-wNN for Sybil attackers.
  std::vector<WalletId> agent_wallets(const AgentSpec &a);

}  // namespace govlab::sim
