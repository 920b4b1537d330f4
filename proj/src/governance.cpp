#include "govlab/governance.hpp"

#include <set>

namespace govlab {

  using nlohmann::json;

  std::string_view phase_name(Phase p) noexcept {
    switch (p) {
      case Phase::kDraft:
        return "Draft";
      case Phase::kDiscussion:
        return "Discussion";
      case Phase::kVoting:
        return "Voting";
      case Phase::kPassed:
        return "Passed";
      case Phase::kRejected:
        return "Rejected";
      case Phase::kQuorumFailed:
        return "QuorumFailed";
      case Phase::kExecuted:
        return "Executed";
    }
    return "Unknown";
  }

  Phase parse_phase(std::string_view name) {
    for (auto p : {Phase::kDraft, Phase::kDiscussion, Phase::kVoting, Phase::kPassed,
                   Phase::kRejected, Phase::kQuorumFailed, Phase::kExecuted}) {
      if (phase_name(p) == name) {
        return p;
      }
    }
    throw Error(Errc::kParse, "unknown phase '" + std::string(name) + "'");
  }

  bool is_allowed_transition(Phase from, Phase to) noexcept {
    switch (from) {
      case Phase::kDraft:
        return to == Phase::kDiscussion;
      case Phase::kDiscussion:
        return to == Phase::kVoting;
      case Phase::kVoting:
        return to == Phase::kPassed || to == Phase::kRejected
            || to == Phase::kQuorumFailed;
      case Phase::kPassed:
        return to == Phase::kExecuted;
      default:
        return false;
    }
  }

  bool is_terminal(Phase p) noexcept {
    return p == Phase::kPassed || p == Phase::kRejected
        || p == Phase::kQuorumFailed || p == Phase::kExecuted;
  }

  void ProposalSpec::validate() const {
    if (options.size() < 2) {
      throw Error(Errc::kInvalidArgument,
                  "proposal " + id.str() + " needs at least two options");
    }
    std::set<OptionLabel> seen;
    for (const auto &o : options) {
      if (o.empty()) {
        throw Error(Errc::kInvalidArgument,
                    "proposal " + id.str() + " has an empty option label");
      }
      if (!seen.insert(o).second) {
        throw Error(Errc::kInvalidArgument,
                    "proposal " + id.str() + " repeats option '" + o + "'");
      }
    }
    if (discussion.begin >= discussion.end || voting.begin >= voting.end) {
      throw Error(Errc::kInvalidArgument,
                  "proposal " + id.str() + " has an empty or inverted window");
    }
    if (discussion.end > voting.begin) {
      throw Error(Errc::kInvalidArgument,
                  "proposal " + id.str()
                      + ": discussion window must end before voting begins");
    }
    if (quorum) {
      quorum->validate();
    }
    if (mechanism == Mechanism::kQuorum && !quorum) {
      throw Error(Errc::kInvalidArgument,
                  "proposal " + id.str() + " uses the quorum mechanism without a quorum");
    }
  }

  void to_json(json &j, const ProposalSpec &p) {
    j = json{{"id", p.id},
             {"options", p.options},
             {"discussion", {p.discussion.begin, p.discussion.end}},
             {"voting", {p.voting.begin, p.voting.end}},
             {"mechanism", mechanism_name(p.mechanism)},
             {"quorum", p.quorum ? json(*p.quorum) : json()}};
  }

  void from_json(const json &j, ProposalSpec &p) {
    j.at("id").get_to(p.id);
    j.at("options").get_to(p.options);
    auto window = [&j](const char *key) {
      const auto &w = j.at(key);
      if (!w.is_array() || w.size() != 2) {
        throw Error(Errc::kParse, std::string(key) + " window must be [begin, end]");
      }
      return Window{w[0].get<Tick>(), w[1].get<Tick>()};
    };
    p.discussion = window("discussion");
    p.voting = window("voting");
    p.mechanism = parse_mechanism(j.at("mechanism").get<std::string>());
    const auto &q = j.at("quorum");
    p.quorum = q.is_null() ? std::nullopt
                           : std::optional<QuorumConfig>(q.get<QuorumConfig>());
  }

  namespace {

    json identity_json(const std::optional<IdentityConfig> &id) {
      if (!id) {
        return json();
      }
      return json{{"mode", registry_mode_name(id->mode)},
                  {"policy", policy_name(id->policy)}};
    }

    json filter_json(const std::optional<FilterResult> &f) {
      if (!f) {
        return json();
      }
      return json{{"dropped_unverified", f->dropped_unverified},
                  {"equivocating", f->equivocating}};
    }

  }  // namespace

  Engine::Engine(EngineConfig config)
      : config_(std::move(config)),
        registry_(config_.identity ? config_.identity->mode
                                   : RegistryMode::kStrictOneWallet) {
    config_.conviction.validate();
    ledger_.append(json{{"type", "genesis"},
                        {"supply", config_.supply},
                        {"conviction", config_.conviction},
                        {"identity", identity_json(config_.identity)}});
  }

  void Engine::observe_tick(Tick now) {
    if (now < last_tick_) {
      throw Error(Errc::kTickRegression,
                  "tick " + std::to_string(now) + " arrives after tick "
                      + std::to_string(last_tick_));
    }
    last_tick_ = now;
  }

  void Engine::transition(Proposal &p, Phase to) {
    if (!is_allowed_transition(p.phase, to)) {
      throw Error(Errc::kInvalidTransition,
                  "proposal " + p.spec.id.str() + " cannot move from "
                      + std::string(phase_name(p.phase)) + " to "
                      + std::string(phase_name(to)));
    }
    p.phase = to;
  }

  Proposal &Engine::find(const ProposalId &id) {
    auto it = proposals_.find(id);
    if (it == proposals_.end()) {
      throw Error(Errc::kUnknownProposal, "unknown proposal " + id.str());
    }
    return it->second;
  }

  const Proposal &Engine::proposal(const ProposalId &id) const {
    return const_cast<Engine *>(this)->find(id);
  }

  TokenAmount Engine::balance(const WalletId &wallet) const {
    auto it = balances_.find(wallet);
    return it == balances_.end() ? TokenAmount{} : it->second;
  }

  TokenAmount Engine::locked(const WalletId &wallet) const {
    TokenAmount total;
    if (auto it = locks_.find(wallet); it != locks_.end()) {
      for (const auto &[proposal, amount] : it->second) {
        total += amount;
      }
    }
    return total;
  }

  void Engine::set_balance(const WalletId &wallet, TokenAmount amount) {
    if (amount < locked(wallet)) {
      throw Error(Errc::kInsufficientUnlockedTokens,
                  "balance of " + wallet.str() + " would fall below its locked tokens");
    }
    TokenAmount declared = declared_ - balance(wallet) + amount;
    if (declared > config_.supply) {
      throw Error(Errc::kSupplyTooSmall,
                  "holdings " + declared.str() + " exceed supply "
                      + config_.supply.str());
    }
    declared_ = declared;
    balances_[wallet] = amount;
    ledger_.append(json{{"type", "holding"}, {"wallet", wallet}, {"balance", amount}});
  }

  void Engine::apply_binding(const VerificationOutcome &outcome) {
    if (!config_.identity) {
      throw Error(Errc::kInvalidArgument, "engine has no identity layer");
    }
    ledger_.append(json{
        {"type", "bind"},
        {"identity", outcome.identity},
        {"wallet", outcome.wallet},
        {"accepted", outcome.accepted},
        {"reason", outcome.reason ? json(reject_reason_name(*outcome.reason)) : json()}});
  }

  VerificationOutcome Engine::bind(const IdentityClaim &claim,
                                   SimulatedProvider &provider) {
    if (!config_.identity) {
      throw Error(Errc::kInvalidArgument, "engine has no identity layer");
    }
    auto outcome = registry_.bind_verified(claim, provider);
    apply_binding(outcome);
    return outcome;
  }

  const Proposal &Engine::submit(const ProposalSpec &spec, Tick now) {
    spec.validate();
    if (proposals_.contains(spec.id)) {
      throw Error(Errc::kDuplicateProposal, "proposal " + spec.id.str() + " already exists");
    }
    if (now >= spec.discussion.end) {
      throw Error(Errc::kOutOfWindow,
                  "proposal " + spec.id.str() + " submitted after its discussion window");
    }
    observe_tick(now);
    Proposal p{spec, Phase::kDraft, {}, std::nullopt, std::nullopt};
    transition(p, Phase::kDiscussion);
    auto &stored = proposals_.emplace(spec.id, std::move(p)).first->second;
    ledger_.append(json{{"type", "submit"}, {"tick", now}, {"proposal", spec}});
    return stored;
  }

  const Proposal &Engine::open_voting(const ProposalId &id, Tick now) {
    auto &p = find(id);
    if (!p.spec.voting.contains(now)) {
      throw Error(Errc::kOutOfWindow,
                  "voting on " + id.str() + " cannot open at tick " + std::to_string(now));
    }
    observe_tick(now);
    transition(p, Phase::kVoting);
    ledger_.append(json{{"type", "open_voting"}, {"tick", now}, {"proposal", id}});
    return p;
  }

  const Proposal &Engine::cast(const VoteRecord &vote, Tick now) {
    auto &p = find(vote.proposal);
    validate_vote(vote);
    if (p.phase != Phase::kVoting) {
      throw Error(Errc::kInvalidTransition,
                  "proposal " + p.spec.id.str() + " is not open for voting");
    }
    if (!p.spec.voting.contains(now)) {
      throw Error(Errc::kOutOfWindow,
                  "cast at tick " + std::to_string(now) + " outside the voting window of "
                      + p.spec.id.str());
    }
    if (std::find(p.spec.options.begin(), p.spec.options.end(), vote.option)
        == p.spec.options.end()) {
      throw Error(Errc::kInvalidArgument,
                  "proposal " + p.spec.id.str() + " has no option '" + vote.option + "'");
    }
    auto &wallet_locks = locks_[vote.wallet];
    TokenAmount elsewhere = locked(vote.wallet);
    if (auto it = wallet_locks.find(p.spec.id); it != wallet_locks.end()) {
      elsewhere -= it->second;
    }
    TokenAmount bal = balance(vote.wallet);
    if (bal < elsewhere || bal - elsewhere < vote.committed) {
      throw Error(Errc::kInsufficientUnlockedTokens,
                  "wallet " + vote.wallet.str() + " cannot commit " + vote.committed.str()
                      + " (balance " + bal.str() + ", locked elsewhere "
                      + elsewhere.str() + ")");
    }
    observe_tick(now);

    VoteRecord recorded = vote;
    recorded.cast_at = now;
    // Conviction keeps accruing while the option is unchanged and resets on
    // a switch.
    if (auto prior = p.votes.find(vote.wallet);
        prior != p.votes.end() && p.spec.mechanism == Mechanism::kConviction
        && prior->second.option == vote.option) {
      recorded.cast_at = prior->second.cast_at;
    }
    wallet_locks[p.spec.id] = vote.committed;
    p.votes.insert_or_assign(vote.wallet, recorded);
    ledger_.append(json{{"type", "cast"}, {"tick", now}, {"vote", recorded}});
    return p;
  }

  const Proposal &Engine::finalize(const ProposalId &id, Tick now) {
    auto &p = find(id);
    if (p.phase != Phase::kVoting) {
      throw Error(Errc::kInvalidTransition,
                  "proposal " + id.str() + " is not in Voting (phase "
                      + std::string(phase_name(p.phase)) + ")");
    }
    if (now < p.spec.voting.end) {
      throw Error(Errc::kOutOfWindow,
                  "proposal " + id.str() + " cannot finalize before tick "
                      + std::to_string(p.spec.voting.end));
    }
    observe_tick(now);

    std::vector<VoteRecord> votes;
    votes.reserve(p.votes.size());
    for (const auto &[wallet, vote] : p.votes) {
      votes.push_back(vote);
    }
    if (config_.identity) {
      p.filtered = filter_and_collapse(votes, registry_, config_.identity->policy);
      votes = p.filtered->votes;
    }
    TallyParams params{p.spec.mechanism, p.spec.quorum, config_.conviction,
                       p.spec.options};
    auto result = tally(votes, params, config_.supply, balances_.size(), now);

    Phase to = Phase::kRejected;
    if (result.outcome == OutcomeKind::kQuorumFailed) {
      to = Phase::kQuorumFailed;
    } else if (result.outcome == OutcomeKind::kWinner
               && *result.winner == p.spec.options.front()) {
      to = Phase::kPassed;
    }
    transition(p, to);
    p.result = std::move(result);
    for (auto &[wallet, per_proposal] : locks_) {
      per_proposal.erase(id);
    }
    ledger_.append(json{{"type", "finalize"},
                        {"tick", now},
                        {"proposal", id},
                        {"phase", phase_name(p.phase)},
                        {"tally", *p.result},
                        {"identity_filter", filter_json(p.filtered)}});
    return p;
  }

  const Proposal &Engine::execute(const ProposalId &id, Tick now) {
    auto &p = find(id);
    observe_tick(now);
    transition(p, Phase::kExecuted);
    ledger_.append(json{{"type", "execute"}, {"tick", now}, {"proposal", id}});
    return p;
  }

  void Engine::advance_to(Tick now) {
    for (auto &[id, p] : proposals_) {
      if (p.phase == Phase::kDiscussion && now >= p.spec.voting.begin
          && now < p.spec.voting.end) {
        open_voting(id, now);
      }
    }
    for (auto &[id, p] : proposals_) {
      if (p.phase == Phase::kVoting && now >= p.spec.voting.end) {
        finalize(id, now);
      }
    }
  }

  Engine Engine::replay(std::span<const LedgerEntry> entries) {
    if (entries.empty()) {
      throw Error(Errc::kParse, "cannot replay an empty log");
    }
    auto event_of = [](const LedgerEntry &e) {
      auto j = json::parse(e.payload, nullptr, false);
      if (j.is_discarded() || !j.is_object()) {
        throw Error(Errc::kParse, "event " + std::to_string(e.index) + " is not JSON");
      }
      return j;
    };
    auto genesis = event_of(entries.front());
    if (genesis.value("type", "") != "genesis") {
      throw Error(Errc::kParse, "log does not start with a genesis event");
    }
    EngineConfig config;
    genesis.at("supply").get_to(config.supply);
    genesis.at("conviction").get_to(config.conviction);
    if (const auto &id = genesis.at("identity"); !id.is_null()) {
      config.identity = IdentityConfig{
          parse_registry_mode(id.at("mode").get<std::string>()),
          parse_policy(id.at("policy").get<std::string>())};
    }
    Engine engine(std::move(config));

    for (const auto &entry : entries.subspan(1)) {
      auto ev = event_of(entry);
      auto type = ev.at("type").get<std::string>();
      if (type == "holding") {
        engine.set_balance(ev.at("wallet").get<WalletId>(),
                           ev.at("balance").get<TokenAmount>());
      } else if (type == "bind") {
        VerificationOutcome outcome{ev.at("wallet").get<WalletId>(),
                                    ev.at("identity").get<IdentityId>(),
                                    ev.at("accepted").get<bool>(), std::nullopt};
        if (outcome.accepted) {
          auto redo = engine.registry_.bind(outcome.identity, outcome.wallet);
          if (!redo.accepted) {
            throw Error(Errc::kInvalidArgument,
                        "replayed binding rejected at event " + std::to_string(entry.index));
          }
        } else {
          auto reason = ev.at("reason").get<std::string>();
          for (auto r : {RejectReason::kDuplicateIdentity, RejectReason::kWalletAlreadyBound,
                         RejectReason::kProviderRejected}) {
            if (reject_reason_name(r) == reason) {
              outcome.reason = r;
            }
          }
        }
        engine.apply_binding(outcome);
      } else if (type == "submit") {
        engine.submit(ev.at("proposal").get<ProposalSpec>(), ev.at("tick").get<Tick>());
      } else if (type == "open_voting") {
        engine.open_voting(ev.at("proposal").get<ProposalId>(), ev.at("tick").get<Tick>());
      } else if (type == "cast") {
        engine.cast(ev.at("vote").get<VoteRecord>(), ev.at("tick").get<Tick>());
      } else if (type == "finalize") {
        const auto &p = engine.finalize(ev.at("proposal").get<ProposalId>(),
                                        ev.at("tick").get<Tick>());
        if (json(*p.result) != ev.at("tally")
            || phase_name(p.phase) != ev.at("phase").get<std::string>()) {
          throw Error(Errc::kInvalidArgument,
                      "replayed tally differs from the log at event "
                          + std::to_string(entry.index));
        }
      } else if (type == "execute") {
        engine.execute(ev.at("proposal").get<ProposalId>(), ev.at("tick").get<Tick>());
      } else {
        throw Error(Errc::kParse, "unknown event type '" + type + "'");
      }
    }
    return engine;
  }

}  // namespace govlab
