#pragma once

#include <optional>
#include <string>
#include <vector>

#include "govlab/mechanisms.hpp"

namespace govlab::sim {

  // Empirical probes of Arrow's criteria on instances small enough to
  // enumerate. They exhibit witnesses; they prove nothing in general.

  inline constexpr std::size_t kMaxProbeAgents = 4;
  inline constexpr std::size_t kMaxProbeOptions = 3;

  struct ProbeAgent {
    std::string name;
    /// One entry per wallet the agent votes from.
    std::vector<TokenAmount> wallets;
  };

  struct ProbeInstance {
    Mechanism mechanism = Mechanism::kToken;
    std::vector<OptionLabel> options;
    std::vector<ProbeAgent> agents;
    /// Merge each agent's wallets before applying power (identity collapse).
    bool collapse_per_identity = false;
    ConvictionParams conviction;
    /// Ticks every vote has been held when tallied (conviction only).
    Tick elapsed = 0;
  };

  /// Plurality outcome when agent i votes for choices[i].
  TallyResult tally_profile(const ProbeInstance &inst,
                            const std::vector<OptionLabel> &choices);

  /// Names of agents whose top choice wins outright in every one of the
  /// |options|^|agents| top-choice profiles. Throws kInstanceTooLarge past
  /// 4 agents or 3 options.
  std::vector<std::string> dictator_probe(const ProbeInstance &inst);

  struct IiaWitness {
    /// Full strict preference order per agent.
    std::vector<std::vector<OptionLabel>> profile;
    OptionLabel removed;
    OptionLabel winner_before;
    /// Winner after the removal, or empty on a tie.
    std::optional<OptionLabel> winner_after;
  };

  void to_json(nlohmann::json &j, const IiaWitness &w);

  /// Checks one profile: does deleting some non-winning option change the
  /// outcome among the remaining two?
  std::optional<IiaWitness> iia_check_profile(
      const ProbeInstance &inst, const std::vector<std::vector<OptionLabel>> &profile);

  /// First witness over all (3!)^|agents| strict-order profiles (agent 0's
  /// order varies fastest); none for instances with fewer than 3 options.
  std::optional<IiaWitness> iia_probe(const ProbeInstance &inst);

}  // namespace govlab::sim
