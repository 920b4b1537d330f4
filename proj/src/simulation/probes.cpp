#include "govlab/simulation/probes.hpp"

#include <algorithm>

namespace govlab::sim {

  namespace {

    void check_size(const ProbeInstance &inst) {
      if (inst.agents.size() > kMaxProbeAgents || inst.options.size() > kMaxProbeOptions) {
        throw Error(Errc::kInstanceTooLarge,
                    "probe instance has " + std::to_string(inst.agents.size())
                        + " agents and " + std::to_string(inst.options.size())
                        + " options; at most 4 and 3 are enumerable");
      }
      if (inst.agents.empty() || inst.options.size() < 2) {
        throw Error(Errc::kInvalidArgument, "probe needs an agent and two options");
      }
    }

    // Mixed-radix counter over profiles; returns false once it wraps.
    bool next_profile(std::vector<std::size_t> &digits, std::size_t radix) {
      for (auto &d : digits) {
        if (++d < radix) {
          return true;
        }
        d = 0;
      }
      return false;
    }

    OptionLabel top_among(const std::vector<OptionLabel> &order,
                          const OptionLabel &excluded) {
      for (const auto &o : order) {
        if (o != excluded) {
          return o;
        }
      }
      throw Error(Errc::kInvalidArgument, "preference order has no admissible option");
    }

  }  // namespace

  TallyResult tally_profile(const ProbeInstance &inst,
                            const std::vector<OptionLabel> &choices) {
    std::vector<VoteRecord> votes;
    TokenAmount supply;
    ProposalId pid("probe");
    for (std::size_t i = 0; i < inst.agents.size(); ++i) {
      const auto &agent = inst.agents[i];
      auto add = [&](TokenAmount amount, std::size_t w) {
        if (amount.is_zero()) {
          return;
        }
        votes.push_back(VoteRecord{WalletId("a" + std::to_string(i) + "w" + std::to_string(w)),
                                   pid, choices[i], amount, 0});
        supply += amount;
      };
      if (inst.collapse_per_identity) {
        TokenAmount merged;
        for (auto w : agent.wallets) {
          merged += w;
        }
        add(merged, 0);
      } else {
        for (std::size_t w = 0; w < agent.wallets.size(); ++w) {
          add(agent.wallets[w], w);
        }
      }
    }
    // quorum gating is meaningless here: every agent participates
    TallyParams params{inst.mechanism == Mechanism::kQuorum ? Mechanism::kToken
                                                            : inst.mechanism,
                       std::nullopt, inst.conviction, inst.options};
    return tally(votes, params, supply, votes.size(), inst.elapsed);
  }

  std::vector<std::string> dictator_probe(const ProbeInstance &inst) {
    check_size(inst);
    const std::size_t k = inst.agents.size();
    const std::size_t m = inst.options.size();
    std::vector<bool> dictator(k, true);
    std::vector<std::size_t> digits(k, 0);
    do {
      std::vector<OptionLabel> choices;
      for (auto d : digits) {
        choices.push_back(inst.options[d]);
      }
      auto result = tally_profile(inst, choices);
      for (std::size_t i = 0; i < k; ++i) {
        if (result.outcome != OutcomeKind::kWinner || *result.winner != choices[i]) {
          dictator[i] = false;
        }
      }
    } while (next_profile(digits, m));

    std::vector<std::string> flagged;
    for (std::size_t i = 0; i < k; ++i) {
      if (dictator[i]) {
        flagged.push_back(inst.agents[i].name);
      }
    }
    return flagged;
  }

  void to_json(nlohmann::json &j, const IiaWitness &w) {
    j = nlohmann::json{
        {"profile", w.profile},
        {"removed", w.removed},
        {"winner_before", w.winner_before},
        {"winner_after", w.winner_after ? nlohmann::json(*w.winner_after) : nlohmann::json()}};
  }

  std::optional<IiaWitness> iia_check_profile(
      const ProbeInstance &inst, const std::vector<std::vector<OptionLabel>> &profile) {
    check_size(inst);
    if (inst.options.size() < 3) {
      return std::nullopt;
    }
    std::vector<OptionLabel> tops;
    for (const auto &order : profile) {
      tops.push_back(order.front());
    }
    auto before = tally_profile(inst, tops);
    if (before.outcome != OutcomeKind::kWinner) {
      return std::nullopt;
    }
    for (const auto &removed : inst.options) {
      if (removed == *before.winner) {
        continue;
      }
      ProbeInstance reduced = inst;
      reduced.options.erase(
          std::find(reduced.options.begin(), reduced.options.end(), removed));
      std::vector<OptionLabel> choices;
      for (const auto &order : profile) {
        choices.push_back(top_among(order, removed));
      }
      auto after = tally_profile(reduced, choices);
      if (after.outcome != OutcomeKind::kWinner || *after.winner != *before.winner) {
        return IiaWitness{profile, removed, *before.winner, after.winner};
      }
    }
    return std::nullopt;
  }

  std::optional<IiaWitness> iia_probe(const ProbeInstance &inst) {
    check_size(inst);
    if (inst.options.size() < 3) {
      return std::nullopt;
    }
    std::vector<std::vector<OptionLabel>> orders;
    std::vector<OptionLabel> perm = inst.options;
    std::sort(perm.begin(), perm.end());
    do {
      orders.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::vector<std::size_t> digits(inst.agents.size(), 0);
    do {
      std::vector<std::vector<OptionLabel>> profile;
      for (auto d : digits) {
        profile.push_back(orders[d]);
      }
      if (auto w = iia_check_profile(inst, profile)) {
        return w;
      }
    } while (next_profile(digits, orders.size()));
    return std::nullopt;
  }

}  // namespace govlab::sim
