#include "govlab/simulation/runner.hpp"

#include <map>
#include <set>
#include <sstream>

#include "govlab/simulation/metrics.hpp"
#include "govlab/sybil.hpp"

namespace govlab::sim {

  using nlohmann::json;

  namespace {

    json ratio_or_null(const std::optional<Ratio> &r) {
      return r ? json(*r) : json();
    }

    json gini_or_null(const std::vector<VotingPower> &powers) {
      for (auto p : powers) {
        if (!p.is_zero()) {
          return gini(powers);
        }
      }
      return json();
    }

    json count_or_null(const std::optional<std::uint64_t> &n) {
      return n ? json(*n) : json();
    }

    struct AgentState {
      const AgentSpec *spec = nullptr;
      std::vector<WalletId> wallets;
      /// Wallets that can cast countable votes.
      std::vector<WalletId> eligible;
    };

    /// Commitments per eligible wallet for one declared vote.
    std::vector<std::pair<WalletId, TokenAmount>> commitments(const AgentState &a,
                                                              const AgentVote &v,
                                                              const Engine &engine) {
      std::vector<std::pair<WalletId, TokenAmount>> out;
      if (a.spec->kind != AgentKind::kSybilAttacker) {
        out.emplace_back(a.wallets.front(), v.commit.value_or(a.spec->balance));
        return out;
      }
      if (v.commit) {
        auto parts = split_uniform(*v.commit, a.eligible.size());
        for (std::size_t i = 0; i < a.eligible.size(); ++i) {
          out.emplace_back(a.eligible[i], parts[i]);
        }
      } else {
        for (const auto &w : a.eligible) {
          out.emplace_back(w, engine.balance(w));
        }
      }
      return out;
    }

  }  // namespace

  RunResult run(const Scenario &s) {
    if (auto problems = validate(s); !problems.empty()) {
      throw ValidationError(std::move(problems));
    }
    EngineConfig config{s.supply, s.conviction, std::nullopt};
    if (s.identity) {
      config.identity = IdentityConfig{s.identity->mode, s.identity->policy};
    }
    Engine engine(config);

    std::vector<AgentState> agents;
    std::map<WalletId, std::size_t> owner;
    for (const auto &spec : s.agents) {
      AgentState a{&spec, agent_wallets(spec), {}};
      for (const auto &w : a.wallets) {
        owner.emplace(w, agents.size());
      }
      agents.push_back(std::move(a));
    }

    // Identity verification happens before tokens are distributed, so an
    // attacker only spreads its balance over wallets that will be counted.
    std::uint64_t accepted = 0;
    std::map<std::string, std::uint64_t> rejected;
    std::optional<SimulatedProvider> provider;
    if (s.identity) {
      provider.emplace(ProviderParams{s.identity->false_accept_rate, s.seed});
    }
    for (auto &a : agents) {
      if (!s.identity || s.identity->policy == UnverifiedPolicy::kAdmitUnverified) {
        a.eligible = a.wallets;
      }
      if (!s.identity) {
        continue;
      }
      for (std::size_t i = 0; i < a.wallets.size(); ++i) {
        bool fake = a.spec->kind == AgentKind::kSybilAttacker
                 && a.spec->identity_strategy == IdentityStrategy::kFakeIdentities && i > 0;
        std::string identity = a.spec->name;
        if (fake) {
          identity += "-f" + a.wallets[i].str().substr(a.spec->name.size() + 2);
        }
        auto outcome = engine.bind(IdentityClaim{IdentityId(identity), a.wallets[i], !fake},
                                   *provider);
        if (outcome.accepted) {
          ++accepted;
          if (s.identity->policy == UnverifiedPolicy::kDropUnverified) {
            a.eligible.push_back(a.wallets[i]);
          }
        } else {
          ++rejected[std::string(reject_reason_name(*outcome.reason))];
        }
      }
    }

    for (const auto &a : agents) {
      if (a.spec->kind != AgentKind::kSybilAttacker) {
        engine.set_balance(a.wallets.front(), a.spec->balance);
        continue;
      }
      auto parts = split_uniform(a.spec->balance, a.eligible.size());
      std::map<WalletId, TokenAmount> share;
      for (std::size_t i = 0; i < a.eligible.size(); ++i) {
        share.emplace(a.eligible[i], parts[i]);
      }
      for (const auto &w : a.wallets) {
        auto it = share.find(w);
        engine.set_balance(w, it == share.end() ? TokenAmount{} : it->second);
      }
    }

    std::map<Tick, std::vector<std::pair<std::size_t, const AgentVote *>>> schedule;
    for (std::size_t i = 0; i < agents.size(); ++i) {
      for (const auto &v : agents[i].spec->votes) {
        schedule[v.tick].emplace_back(i, &v);
      }
    }

    for (Tick t = 0; t <= s.ticks; ++t) {
      for (const auto &tmpl : s.proposals) {
        if (tmpl.spec.discussion.begin == t) {
          engine.submit(s.resolved(tmpl), t);
        }
      }
      engine.advance_to(t);
      for (const auto &tmpl : s.proposals) {
        auto it = engine.proposals().find(tmpl.spec.id);
        if (tmpl.execute_on_pass && it != engine.proposals().end()
            && it->second.phase == Phase::kPassed) {
          engine.execute(tmpl.spec.id, t);
        }
      }
      if (auto it = schedule.find(t); it != schedule.end()) {
        for (const auto &[idx, vote] : it->second) {
          for (const auto &[wallet, amount] : commitments(agents[idx], *vote, engine)) {
            if (amount.is_zero()) {
              continue;
            }
            engine.cast(VoteRecord{wallet, vote->proposal, vote->preference.front(),
                                   amount, t},
                        t);
          }
        }
      }
    }

    // ---- metrics ----
    RunResult out;
    json proposals = json::array();
    std::map<WalletId, VotingPower> voter_totals;
    std::optional<Ratio> max_amplification;

    for (const auto &tmpl : s.proposals) {
      const auto &p = engine.proposal(tmpl.spec.id);
      const Tick now = p.spec.voting.end;
      out.phases.emplace(p.spec.id, p.phase);

      std::vector<VoteRecord> counted;
      if (p.filtered) {
        counted = p.filtered->votes;
      } else {
        for (const auto &[w, v] : p.votes) {
          counted.push_back(v);
        }
      }
      std::vector<VotingPower> powers;
      std::map<std::size_t, VotingPower> realized;
      for (const auto &v : counted) {
        auto power = mechanism_power(p.spec.mechanism, v.committed, v.cast_at, now,
                                     s.conviction);
        powers.push_back(power);
        realized[owner.at(v.wallet)] += power;
        voter_totals[v.wallet] += power;
      }

      std::map<std::size_t, TokenAmount> committed;
      std::map<std::size_t, Tick> first_cast;
      for (const auto &[w, v] : p.votes) {
        auto idx = owner.at(w);
        committed[idx] += v.committed;
        auto [it, fresh] = first_cast.emplace(idx, v.cast_at);
        if (!fresh) {
          it->second = std::min(it->second, v.cast_at);
        }
      }

      json amplification = json::object();
      for (const auto &[idx, tokens] : committed) {
        const auto &a = agents[idx];
        out.agent_powers.push_back(
            AgentPower{a.spec->name, a.spec->kind, p.spec.id, tokens, realized[idx]});
        if (a.spec->kind != AgentKind::kSybilAttacker) {
          continue;
        }
        auto honest = mechanism_power(p.spec.mechanism, tokens, first_cast[idx], now,
                                      s.conviction);
        std::optional<Ratio> amp;
        if (!honest.is_zero()) {
          amp = ratio_of(realized[idx].units(), honest.units());
          max_amplification = max_amplification ? std::max(*max_amplification, *amp) : *amp;
        }
        amplification[a.spec->name] = ratio_or_null(amp);
      }

      const auto &tally = *p.result;
      json conviction;
      if (p.spec.mechanism == Mechanism::kConviction) {
        auto total = tally.total_power();
        conviction = json{
            {"at_finalize", total},
            {"fraction_of_committed",
             tally.participating_tokens.is_zero()
                 ? json()
                 : json(ratio_of(total.units(), tally.participating_tokens.units()))}};
      }

      json probes;
      std::size_t voters = 0;
      for (const auto &a : s.agents) {
        for (const auto &v : a.votes) {
          if (v.proposal == p.spec.id) {
            ++voters;
            break;
          }
        }
      }
      if (voters >= 1 && voters <= kMaxProbeAgents
          && p.spec.options.size() <= kMaxProbeOptions) {
        auto inst = probe_instance(s, p.spec.id);
        auto witness = iia_probe(inst);
        probes = json{{"label", "probe"},
                      {"dictator_flagged", dictator_probe(inst)},
                      {"iia_witness", witness ? json(*witness) : json()}};
      }

      json filter;
      if (p.filtered) {
        filter = json{{"dropped_unverified", p.filtered->dropped_unverified.size()},
                      {"equivocating", p.filtered->equivocating}};
      }

      proposals.push_back(json{
          {"id", p.spec.id},
          {"mechanism", mechanism_name(p.spec.mechanism)},
          {"phase", phase_name(p.phase)},
          {"tally", tally},
          {"participation",
           {{"token_fraction",
             s.supply.is_zero() ? json()
                                : json(ratio_of(tally.participating_tokens.units(),
                                                s.supply.units()))},
            {"wallet_fraction",
             engine.balances().empty()
                 ? json()
                 : json(ratio_of(tally.participating_wallets,
                                 engine.balances().size()))}}},
          {"power_gini", gini_or_null(powers)},
          {"min_controlling_set", count_or_null(min_controlling_set(powers))},
          {"sybil_amplification", amplification},
          {"conviction", conviction},
          {"arrow_probes", probes},
          {"identity_filter", filter}});
    }

    std::vector<VotingPower> totals;
    for (const auto &[w, power] : voter_totals) {
      totals.push_back(power);
    }

    json agent_rows = json::array();
    for (const auto &a : agents) {
      agent_rows.push_back(json{{"name", a.spec->name},
                                {"kind", agent_kind_name(a.spec->kind)},
                                {"balance", a.spec->balance},
                                {"wallets", a.wallets.size()},
                                {"eligible_wallets", a.eligible.size()}});
    }

    json identity;
    if (s.identity) {
      identity = json{{"mode", registry_mode_name(s.identity->mode)},
                      {"policy", policy_name(s.identity->policy)},
                      {"false_accept_rate", format_real(s.identity->false_accept_rate)},
                      {"bindings_accepted", accepted},
                      {"bindings_rejected", rejected}};
    }

    out.ledger = engine.ledger().entries();
    out.head_hash = engine.ledger().head_hash();
    out.report = json{{"schema_version", kSchemaVersion},
                      {"scenario", s.name},
                      {"mechanism", mechanism_name(s.mechanism)},
                      {"supply", s.supply},
                      {"wallet_universe", engine.balances().size()},
                      {"identity", identity},
                      {"agents", agent_rows},
                      {"proposals", proposals},
                      {"power_gini", gini_or_null(totals)},
                      {"min_controlling_set", count_or_null(min_controlling_set(totals))},
                      {"sybil_amplification", ratio_or_null(max_amplification)},
                      {"ledger", {{"entries", out.ledger.size()}, {"head_hash", out.head_hash}}}};
    return out;
  }

  std::string report_text(const json &report) {
    return report.dump(2) + "\n";
  }

  std::string agent_powers_csv(const RunResult &result) {
    std::ostringstream out;
    out << "agent,kind,proposal,committed,realized_power\n";
    for (const auto &row : result.agent_powers) {
      out << row.agent << ',' << agent_kind_name(row.kind) << ',' << row.proposal.str()
          << ',' << row.committed.str() << ',' << row.realized.str() << '\n';
    }
    return out.str();
  }

  ProbeInstance probe_instance(const Scenario &s, const ProposalId &proposal) {
    ProbeInstance inst;
    const ProposalTemplate *tmpl = nullptr;
    for (const auto &t : s.proposals) {
      if (t.spec.id == proposal) {
        tmpl = &t;
      }
    }
    if (!tmpl) {
      throw Error(Errc::kUnknownProposal, "unknown proposal " + proposal.str());
    }
    auto spec = s.resolved(*tmpl);
    inst.mechanism = spec.mechanism;
    inst.options = spec.options;
    inst.conviction = s.conviction;
    inst.elapsed = spec.voting.end - spec.voting.begin;
    inst.collapse_per_identity =
        s.identity && s.identity->mode == RegistryMode::kCollapsePerIdentity;
    for (const auto &a : s.agents) {
      for (const auto &v : a.votes) {
        if (v.proposal != proposal) {
          continue;
        }
        TokenAmount amount = v.commit.value_or(a.balance);
        ProbeAgent agent{a.name, {}};
        if (a.kind == AgentKind::kSybilAttacker) {
          agent.wallets = split_uniform(amount, a.n_wallets);
        } else {
          agent.wallets.push_back(amount);
        }
        inst.agents.push_back(std::move(agent));
        break;
      }
    }
    return inst;
  }

}  // namespace govlab::sim
