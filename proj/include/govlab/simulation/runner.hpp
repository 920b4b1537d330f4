#pragma once

#include <string>
#include <vector>

#include "govlab/simulation/probes.hpp"
#include "govlab/simulation/scenario.hpp"

namespace govlab::sim {

  /// Realized power of one agent on one proposal, after the identity layer.
  struct AgentPower {
    std::string agent;
    AgentKind kind = AgentKind::kHonest;
    ProposalId proposal;
    TokenAmount committed;
    VotingPower realized;
  };

  struct RunResult {
    /// Canonical report document (sorted keys, decimals as strings).
    nlohmann::json report;
    std::vector<LedgerEntry> ledger;
    std::string head_hash;
    std::vector<AgentPower> agent_powers;
    std::map<ProposalId, Phase> phases;
  };

  /// Runs a validated scenario to its horizon. The result depends only on
  /// the scenario (and its seed where the provider draws randomness).
  RunResult run(const Scenario &scenario);

  /// Report text as written to disk: two-space indented JSON plus newline.
  std::string report_text(const nlohmann::json &report);

  /// agent,kind,proposal,committed,realized_power
  std::string agent_powers_csv(const RunResult &result);

  /// Probe instance for one proposal: every agent that votes on it, with its
  /// first declared choice's holdings. Attackers vote from all their wallets.
  ProbeInstance probe_instance(const Scenario &scenario, const ProposalId &proposal);

}  // namespace govlab::sim
