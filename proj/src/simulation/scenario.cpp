#include "govlab/simulation/scenario.hpp"

#include <fstream>
#include <map>
#include <set>

namespace govlab::sim {

  using nlohmann::json;

  std::string_view agent_kind_name(AgentKind k) noexcept {
    switch (k) {
      case AgentKind::kHonest:
        return "honest";
      case AgentKind::kWhale:
        return "whale";
      case AgentKind::kSybilAttacker:
        return "sybil_attacker";
      case AgentKind::kAbstainer:
        return "abstainer";
    }
    return "unknown";
  }

  std::string_view identity_strategy_name(IdentityStrategy s) noexcept {
    return s == IdentityStrategy::kSingleIdentity ? "single_identity"
                                                  : "fake_identities";
  }

  namespace {

    std::string join(const std::vector<std::string> &items) {
      std::string out;
      for (const auto &i : items) {
        out += "\n  " + i;
      }
      return out;
    }

    /// Accumulates problems instead of stopping at the first one.
    struct Problems {
      std::vector<std::string> list;

      template <class F>
      void guard(const std::string &where, F &&f) {
        try {
          f();
        } catch (const json::exception &ex) {
          list.push_back(where + ": " + ex.what());
        } catch (const std::exception &ex) {
          list.push_back(where + ": " + ex.what());
        }
      }
    };

    AgentKind parse_kind(const std::string &name) {
      for (auto k : {AgentKind::kHonest, AgentKind::kWhale, AgentKind::kSybilAttacker,
                     AgentKind::kAbstainer}) {
        if (agent_kind_name(k) == name) {
          return k;
        }
      }
      throw Error(Errc::kParse, "unknown agent kind '" + name + "'");
    }

    IdentityStrategy parse_strategy(const std::string &name) {
      if (name == "single_identity") {
        return IdentityStrategy::kSingleIdentity;
      }
      if (name == "fake_identities") {
        return IdentityStrategy::kFakeIdentities;
      }
      throw Error(Errc::kParse, "unknown identity_strategy '" + name + "'");
    }

    double real_field(const json &j) {
      return j.is_string() ? parse_real(j.get<std::string>()) : j.get<double>();
    }

    std::size_t index_width(std::uint64_t n) {
      std::size_t w = std::to_string(n == 0 ? 0 : n - 1).size();
      return std::max<std::size_t>(w, 2);
    }

  }  // namespace

  ValidationError::ValidationError(std::vector<std::string> problems)
      : Error(Errc::kValidation, "scenario validation failed:" + join(problems)),
        problems_(std::move(problems)) {}

  ProposalSpec Scenario::resolved(const ProposalTemplate &t) const {
    ProposalSpec spec = t.spec;
    spec.mechanism = t.mechanism.value_or(mechanism);
    spec.quorum = t.quorum ? t.quorum : quorum;
    return spec;
  }

  const AgentSpec *Scenario::find_agent(std::string_view agent) const {
    for (const auto &a : agents) {
      if (a.name == agent) {
        return &a;
      }
    }
    return nullptr;
  }

  std::vector<WalletId> agent_wallets(const AgentSpec &a) {
    if (a.kind != AgentKind::kSybilAttacker) {
      return {WalletId(a.name)};
    }
    std::vector<WalletId> out;
    out.reserve(a.n_wallets);
    auto width = index_width(a.n_wallets);
    for (std::uint64_t i = 0; i < a.n_wallets; ++i) {
      std::string idx = std::to_string(i);
      idx.insert(0, width - idx.size(), '0');
      out.emplace_back(a.name + "-w" + idx);
    }
    return out;
  }

  std::vector<std::string> validate(const Scenario &s) {
    std::vector<std::string> out;
    if (s.name.empty()) {
      out.push_back("scenario name is empty");
    }
    std::map<std::string, const ProposalTemplate *> proposals;
    for (const auto &t : s.proposals) {
      const auto &id = t.spec.id.str();
      if (!proposals.emplace(id, &t).second) {
        out.push_back("proposal " + id + " is declared twice");
      }
      try {
        s.resolved(t).validate();
      } catch (const Error &ex) {
        out.push_back(ex.what());
      }
      if (t.spec.voting.end > s.ticks) {
        out.push_back("proposal " + id + " voting window ends at tick "
                      + std::to_string(t.spec.voting.end) + ", past the horizon "
                      + std::to_string(s.ticks));
      }
    }
    if (s.proposals.empty()) {
      out.push_back("scenario declares no proposals");
    }

    std::set<std::string> names;
    std::set<std::string> wallets;
    TokenAmount held;
    for (const auto &a : s.agents) {
      const std::string who = "agent " + a.name;
      if (!names.insert(a.name).second) {
        out.push_back(who + " is declared twice");
      }
      try {
        held += a.balance;
      } catch (const Error &ex) {
        out.push_back(who + ": " + ex.what());
      }
      if (a.kind == AgentKind::kSybilAttacker) {
        if (a.n_wallets < 2) {
          out.push_back(who + ": a sybil_attacker needs n_wallets >= 2");
        } else if (a.n_wallets > a.balance.units()) {
          out.push_back(who + ": balance " + a.balance.str() + " cannot cover "
                        + std::to_string(a.n_wallets) + " wallets");
        }
      }
      if (a.kind == AgentKind::kAbstainer && !a.votes.empty()) {
        out.push_back(who + ": an abstainer declares votes");
      }
      bool ids_ok = true;
      if (a.name.size() + 2 + index_width(a.n_wallets) > kMaxIdLength
          && a.kind == AgentKind::kSybilAttacker) {
        out.push_back(who + ": name too long for derived wallet ids");
        ids_ok = false;
      }
      if (!is_valid_id(a.name)) {
        out.push_back(who + ": name must be 1-64 chars of [A-Za-z0-9_-]");
        ids_ok = false;
      }
      if (ids_ok && a.n_wallets <= 100000) {
        for (const auto &w : agent_wallets(a)) {
          if (!wallets.insert(w.str()).second) {
            out.push_back(who + ": wallet id " + w.str() + " collides with another agent");
          }
        }
      }

      std::set<std::pair<std::string, Tick>> seen_casts;
      for (const auto &v : a.votes) {
        const std::string where = who + " vote on " + v.proposal.str();
        auto it = proposals.find(v.proposal.str());
        if (it == proposals.end()) {
          out.push_back(where + ": unknown proposal");
          continue;
        }
        const auto &spec = it->second->spec;
        if (v.preference.empty()) {
          out.push_back(where + ": no option or preference given");
        }
        std::set<OptionLabel> seen;
        for (const auto &label : v.preference) {
          if (std::find(spec.options.begin(), spec.options.end(), label)
              == spec.options.end()) {
            out.push_back(where + ": option label '" + label
                          + "' does not exist on the proposal");
          }
          if (!seen.insert(label).second) {
            out.push_back(where + ": preference repeats '" + label + "'");
          }
        }
        if (!spec.voting.contains(v.tick)) {
          out.push_back(where + ": tick " + std::to_string(v.tick)
                        + " is outside the voting window");
        }
        if (!seen_casts.emplace(v.proposal.str(), v.tick).second) {
          out.push_back(where + ": two votes at the same tick");
        }
        if (v.commit) {
          if (v.commit->is_zero()) {
            out.push_back(where + ": commit must be positive");
          } else if (*v.commit > a.balance) {
            out.push_back(where + ": commit " + v.commit->str() + " exceeds balance "
                          + a.balance.str());
          }
        } else if (a.balance.is_zero()) {
          out.push_back(where + ": agent holds no tokens to commit");
        }
      }
    }
    if (held > s.supply) {
      out.push_back("agent balances " + held.str() + " exceed supply " + s.supply.str());
    }
    if (s.identity
        && !(s.identity->false_accept_rate >= 0.0 && s.identity->false_accept_rate <= 1.0)) {
      out.push_back("identity.provider.false_accept_rate must lie in [0, 1]");
    }
    return out;
  }

  Scenario parse_scenario(const json &doc) {
    Problems p;
    Scenario s;
    if (!doc.is_object()) {
      throw ValidationError({"scenario document must be a JSON object"});
    }
    p.guard("schema_version", [&] {
      if (doc.at("schema_version").get<int>() != kSchemaVersion) {
        throw Error(Errc::kParse, "unsupported schema_version (expected 1)");
      }
    });
    p.guard("name", [&] { doc.at("name").get_to(s.name); });
    p.guard("seed", [&] { s.seed = doc.value("seed", std::uint64_t{0}); });
    p.guard("ticks", [&] { doc.at("ticks").get_to(s.ticks); });
    p.guard("supply", [&] { doc.at("supply").get_to(s.supply); });
    p.guard("mechanism", [&] {
      s.mechanism = parse_mechanism(doc.at("mechanism").get<std::string>());
    });
    p.guard("quorum", [&] {
      if (doc.contains("quorum") && !doc["quorum"].is_null()) {
        s.quorum = doc["quorum"].get<QuorumConfig>();
      }
    });
    p.guard("conviction", [&] {
      if (doc.contains("conviction") && !doc["conviction"].is_null()) {
        doc["conviction"].get_to(s.conviction);
      }
    });
    p.guard("identity", [&] {
      if (!doc.contains("identity") || doc["identity"].is_null()) {
        return;
      }
      const auto &id = doc["identity"];
      ScenarioIdentity si;
      si.mode = parse_registry_mode(id.at("mode").get<std::string>());
      si.policy = parse_policy(id.value("policy", std::string("drop_unverified")));
      if (id.contains("provider")) {
        si.false_accept_rate = real_field(id["provider"].at("false_accept_rate"));
      }
      s.identity = si;
    });

    if (doc.contains("proposals") && doc["proposals"].is_array()) {
      std::size_t i = 0;
      for (const auto &pj : doc["proposals"]) {
        p.guard("proposals[" + std::to_string(i++) + "]", [&] {
          ProposalTemplate t;
          pj.at("id").get_to(t.spec.id);
          pj.at("options").get_to(t.spec.options);
          auto window = [&pj](const char *key) {
            const auto &w = pj.at(key);
            if (!w.is_array() || w.size() != 2) {
              throw Error(Errc::kParse, std::string(key) + " must be [begin, end]");
            }
            return Window{w[0].get<Tick>(), w[1].get<Tick>()};
          };
          t.spec.discussion = window("discussion");
          t.spec.voting = window("voting");
          if (pj.contains("mechanism")) {
            t.mechanism = parse_mechanism(pj["mechanism"].get<std::string>());
          }
          if (pj.contains("quorum") && !pj["quorum"].is_null()) {
            t.quorum = pj["quorum"].get<QuorumConfig>();
          }
          t.execute_on_pass = pj.value("execute_on_pass", false);
          s.proposals.push_back(std::move(t));
        });
      }
    } else {
      p.list.push_back("proposals: missing or not an array");
    }

    if (doc.contains("agents") && doc["agents"].is_array()) {
      std::size_t i = 0;
      for (const auto &aj : doc["agents"]) {
        std::string where = "agents[" + std::to_string(i++) + "]";
        if (aj.is_object() && aj.contains("name") && aj["name"].is_string()) {
          where = "agent " + aj["name"].get<std::string>();
        }
        p.guard(where, [&] {
          AgentSpec a;
          aj.at("name").get_to(a.name);
          a.kind = parse_kind(aj.at("kind").get<std::string>());
          aj.at("balance").get_to(a.balance);
          if (a.kind == AgentKind::kSybilAttacker) {
            aj.at("n_wallets").get_to(a.n_wallets);
            a.identity_strategy =
                parse_strategy(aj.value("identity_strategy", std::string("single_identity")));
          }
          for (const auto &vj : aj.value("votes", json::array())) {
            AgentVote v;
            vj.at("proposal").get_to(v.proposal);
            if (vj.contains("preference")) {
              vj["preference"].get_to(v.preference);
            } else {
              v.preference.push_back(vj.at("option").get<std::string>());
            }
            vj.at("tick").get_to(v.tick);
            if (vj.contains("commit")) {
              v.commit = vj["commit"].get<TokenAmount>();
            }
            a.votes.push_back(std::move(v));
          }
          s.agents.push_back(std::move(a));
        });
      }
    } else {
      p.list.push_back("agents: missing or not an array");
    }

    if (p.list.empty()) {
      auto semantic = validate(s);
      p.list.insert(p.list.end(), semantic.begin(), semantic.end());
    }
    if (!p.list.empty()) {
      throw ValidationError(std::move(p.list));
    }
    return s;
  }

  Scenario load_scenario(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw Error(Errc::kParse, "cannot read scenario " + path.string());
    }
    auto doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) {
      throw ValidationError({path.string() + ": not valid JSON"});
    }
    return parse_scenario(doc);
  }

  Scenario with_mechanism(const Scenario &s, Mechanism m) {
    Scenario out = s;
    out.mechanism = m;
    for (auto &t : out.proposals) {
      t.mechanism.reset();
    }
    auto problems = validate(out);
    if (!problems.empty()) {
      throw ValidationError(std::move(problems));
    }
    return out;
  }

}  // namespace govlab::sim
