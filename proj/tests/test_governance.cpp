#include <doctest.h>

#include "govlab/core/rng.hpp"
#include "govlab/governance.hpp"

using namespace govlab;
using nlohmann::json;

namespace {

  ProposalSpec spec(const std::string &id, Mechanism m = Mechanism::kToken,
                    std::optional<QuorumConfig> q = std::nullopt) {
    return ProposalSpec{ProposalId(id), {"yes", "no"}, {0, 5}, {5, 10}, m, q};
  }

  VoteRecord vote(const std::string &wallet, const std::string &proposal,
                  const std::string &option, std::int64_t whole) {
    return VoteRecord{WalletId(wallet), ProposalId(proposal), option,
                      TokenAmount::whole(static_cast<std::uint64_t>(whole)), 0};
  }

  Engine funded(std::optional<IdentityConfig> identity = std::nullopt) {
    Engine e(EngineConfig{TokenAmount::whole(1000), {}, identity});
    e.set_balance(WalletId("alice"), TokenAmount::whole(100));
    e.set_balance(WalletId("bob"), TokenAmount::whole(50));
    e.set_balance(WalletId("carol"), TokenAmount::whole(10));
    return e;
  }

  std::string event_type(const LedgerEntry &e) {
    return json::parse(e.payload).at("type").get<std::string>();
  }

}  // namespace

TEST_CASE("lifecycle transition table") {
  using P = Phase;
  CHECK(is_allowed_transition(P::kDraft, P::kDiscussion));
  CHECK(is_allowed_transition(P::kDiscussion, P::kVoting));
  CHECK(is_allowed_transition(P::kVoting, P::kPassed));
  CHECK(is_allowed_transition(P::kVoting, P::kRejected));
  CHECK(is_allowed_transition(P::kVoting, P::kQuorumFailed));
  CHECK(is_allowed_transition(P::kPassed, P::kExecuted));
  CHECK_FALSE(is_allowed_transition(P::kDraft, P::kVoting));
  CHECK_FALSE(is_allowed_transition(P::kRejected, P::kExecuted));
  CHECK_FALSE(is_allowed_transition(P::kQuorumFailed, P::kVoting));
  CHECK_FALSE(is_allowed_transition(P::kExecuted, P::kPassed));
  for (auto p : {P::kRejected, P::kQuorumFailed, P::kExecuted}) {
    CHECK(is_terminal(p));
  }
  CHECK(parse_phase("QuorumFailed") == P::kQuorumFailed);
  CHECK_THROWS_AS(parse_phase("Limbo"), Error);
}

TEST_CASE("proposal spec validation") {
  CHECK_NOTHROW(spec("p").validate());
  auto one_option = spec("p");
  one_option.options = {"yes"};
  CHECK_THROWS_AS(one_option.validate(), Error);
  auto dup = spec("p");
  dup.options = {"yes", "yes"};
  CHECK_THROWS_AS(dup.validate(), Error);
  auto overlap = spec("p");
  overlap.voting = {3, 10};
  CHECK_THROWS_AS(overlap.validate(), Error);
  auto empty = spec("p");
  empty.voting = {5, 5};
  CHECK_THROWS_AS(empty.validate(), Error);
  CHECK_THROWS_AS(spec("p", Mechanism::kQuorum).validate(), Error);

  auto s = spec("p", Mechanism::kQuorum,
                QuorumConfig{QuorumBasis::kTokenSupplyFraction, Ratio::parse("0.2")});
  ProposalSpec back = json(s).get<ProposalSpec>();
  CHECK(back == s);
}

TEST_CASE("submit, cast, finalize") {
  auto e = funded();
  CHECK(e.submit(spec("p"), 0).phase == Phase::kDiscussion);
  CHECK_THROWS_AS(e.submit(spec("p"), 1), Error);

  SUBCASE("cast before voting opens is rejected") {
    CHECK_THROWS_AS(e.cast(vote("alice", "p", "yes", 10), 3), Error);
  }
  SUBCASE("open outside the window is rejected") {
    CHECK_THROWS_AS(e.open_voting(ProposalId("p"), 4), Error);
  }
  SUBCASE("majority passes and locks are released") {
    e.open_voting(ProposalId("p"), 5);
    e.cast(vote("alice", "p", "yes", 60), 6);
    e.cast(vote("bob", "p", "no", 50), 6);
    CHECK(e.locked(WalletId("alice")) == TokenAmount::whole(60));
    CHECK_THROWS_AS(e.finalize(ProposalId("p"), 9), Error);
    const auto &p = e.finalize(ProposalId("p"), 10);
    CHECK(p.phase == Phase::kPassed);
    CHECK(*p.result->winner == "yes");
    CHECK(e.locked(WalletId("alice")).is_zero());
    CHECK_THROWS_AS(e.finalize(ProposalId("p"), 11), Error);
    CHECK(e.execute(ProposalId("p"), 11).phase == Phase::kExecuted);
    CHECK_THROWS_AS(e.execute(ProposalId("p"), 12), Error);
  }
  SUBCASE("majority against rejects") {
    e.open_voting(ProposalId("p"), 5);
    e.cast(vote("bob", "p", "no", 50), 6);
    e.cast(vote("carol", "p", "yes", 10), 6);
    CHECK(e.finalize(ProposalId("p"), 10).phase == Phase::kRejected);
    CHECK_THROWS_AS(e.execute(ProposalId("p"), 11), Error);
  }
  SUBCASE("tie rejects") {
    e.open_voting(ProposalId("p"), 5);
    e.cast(vote("alice", "p", "yes", 50), 6);
    e.cast(vote("bob", "p", "no", 50), 6);
    const auto &p = e.finalize(ProposalId("p"), 10);
    CHECK(p.result->outcome == OutcomeKind::kTie);
    CHECK(p.phase == Phase::kRejected);
  }
  SUBCASE("recast replaces the earlier vote") {
    e.open_voting(ProposalId("p"), 5);
    e.cast(vote("alice", "p", "no", 100), 6);
    e.cast(vote("alice", "p", "yes", 30), 7);
    const auto &p = e.finalize(ProposalId("p"), 10);
    CHECK(p.result->per_option_power.at("yes") == VotingPower::whole(30));
    CHECK(p.result->per_option_power.at("no").is_zero());
  }
  SUBCASE("cast errors") {
    e.open_voting(ProposalId("p"), 5);
    CHECK_THROWS_AS(e.cast(vote("alice", "p", "maybe", 1), 6), Error);
    CHECK_THROWS_AS(e.cast(vote("alice", "p", "yes", 0), 6), Error);
    CHECK_THROWS_AS(e.cast(vote("carol", "p", "yes", 11), 6), Error);
    CHECK_THROWS_AS(e.cast(vote("alice", "ghost", "yes", 1), 6), Error);
    CHECK_THROWS_AS(e.cast(vote("alice", "p", "yes", 1), 10), Error);
  }
  SUBCASE("tick regression is rejected") {
    e.open_voting(ProposalId("p"), 7);
    CHECK_THROWS_AS(e.cast(vote("alice", "p", "yes", 1), 6), Error);
  }
}

TEST_CASE("submission after the discussion window is rejected") {
  auto e = funded();
  CHECK_THROWS_AS(e.submit(spec("p"), 5), Error);
}

TEST_CASE("quorum failure") {
  auto e = funded();
  e.submit(spec("q", Mechanism::kQuorum,
                QuorumConfig{QuorumBasis::kTokenSupplyFraction, Ratio::parse("0.2")}),
           0);
  e.open_voting(ProposalId("q"), 5);
  e.cast(vote("alice", "q", "yes", 100), 6);
  // 100 of 1000 < 20%
  const auto &p = e.finalize(ProposalId("q"), 10);
  CHECK(p.phase == Phase::kQuorumFailed);
  CHECK_FALSE(p.result->winner);
}

TEST_CASE("tokens are locked across concurrent proposals") {
  auto e = funded();
  e.submit(spec("a"), 0);
  e.submit(spec("b"), 0);
  e.advance_to(5);
  e.cast(vote("alice", "a", "yes", 70), 5);
  CHECK_THROWS_AS(e.cast(vote("alice", "b", "yes", 31), 5), Error);
  e.cast(vote("alice", "b", "yes", 30), 5);
  // lowering the stake on a frees tokens for b
  e.cast(vote("alice", "a", "yes", 20), 6);
  e.cast(vote("alice", "b", "yes", 80), 6);
  CHECK(e.locked(WalletId("alice")) == TokenAmount::whole(100));
  CHECK_THROWS_AS(e.set_balance(WalletId("alice"), TokenAmount::whole(99)), Error);
  e.advance_to(10);
  CHECK(e.locked(WalletId("alice")).is_zero());
  CHECK(e.proposal(ProposalId("a")).phase == Phase::kPassed);
}

TEST_CASE("holdings cannot exceed supply") {
  Engine e(EngineConfig{TokenAmount::whole(100), {}, {}});
  e.set_balance(WalletId("a"), TokenAmount::whole(60));
  CHECK_THROWS_AS(e.set_balance(WalletId("b"), TokenAmount::whole(41)), Error);
  e.set_balance(WalletId("a"), TokenAmount::whole(10));
  CHECK_NOTHROW(e.set_balance(WalletId("b"), TokenAmount::whole(90)));
}

TEST_CASE("conviction keeps held_since on a same-option recast") {
  auto e = funded();
  e.submit(spec("c", Mechanism::kConviction), 0);
  e.open_voting(ProposalId("c"), 5);
  e.cast(vote("alice", "c", "yes", 10), 5);
  e.cast(vote("alice", "c", "yes", 20), 8);
  CHECK(e.proposal(ProposalId("c")).votes.at(WalletId("alice")).cast_at == 5);
  e.cast(vote("alice", "c", "no", 20), 9);
  CHECK(e.proposal(ProposalId("c")).votes.at(WalletId("alice")).cast_at == 9);
}

TEST_CASE("identity layer collapses at finalize") {
  auto e = funded(IdentityConfig{RegistryMode::kCollapsePerIdentity,
                                 UnverifiedPolicy::kDropUnverified});
  SimulatedProvider provider({0.0, 1});
  e.bind({IdentityId("x"), WalletId("alice"), true}, provider);
  e.bind({IdentityId("x"), WalletId("bob"), true}, provider);
  CHECK_FALSE(e.bind({IdentityId("fake"), WalletId("carol"), false}, provider).accepted);
  e.submit(spec("p", Mechanism::kQuadratic), 0);
  e.advance_to(5);
  e.cast(vote("alice", "p", "yes", 64), 5);
  e.cast(vote("bob", "p", "yes", 36), 5);
  e.cast(vote("carol", "p", "no", 10), 5);
  e.advance_to(10);
  const auto &p = e.proposal(ProposalId("p"));
  CHECK(p.result->per_option_power.at("yes") == VotingPower::whole(10));
  CHECK(p.result->per_option_power.at("no").is_zero());
  CHECK(p.filtered->dropped_unverified == std::vector<WalletId>{WalletId("carol")});

  Engine plain(EngineConfig{TokenAmount::whole(10), {}, {}});
  CHECK_THROWS_AS(plain.bind({IdentityId("x"), WalletId("a"), true}, provider), Error);
}

TEST_CASE("every operation appends exactly one event and replay reproduces state") {
  auto e = funded();
  CHECK(e.ledger().size() == 4);
  CHECK(event_type(e.ledger().entries()[0]) == "genesis");
  e.submit(spec("p"), 0);
  CHECK(e.ledger().size() == 5);
  e.open_voting(ProposalId("p"), 5);
  e.cast(vote("alice", "p", "yes", 60), 6);
  CHECK(e.ledger().size() == 7);
  try {
    e.cast(vote("alice", "p", "yes", 600), 6);
  } catch (const Error &) {
  }
  CHECK(e.ledger().size() == 7);
  e.finalize(ProposalId("p"), 10);
  e.execute(ProposalId("p"), 10);
  REQUIRE(e.ledger().size() == 9);
  CHECK(event_type(e.ledger().entries().back()) == "execute");
  CHECK(e.ledger().verify().ok());

  auto again = Engine::replay(e.ledger().entries());
  CHECK(again.ledger().head_hash() == e.ledger().head_hash());
  CHECK(again.proposal(ProposalId("p")).phase == Phase::kExecuted);

  auto forged = e.ledger().entries();
  auto fin = json::parse(forged[7].payload);
  fin["phase"] = "Rejected";
  forged[7].payload = fin.dump();
  CHECK_THROWS_AS(Engine::replay(forged), Error);
}

TEST_CASE("random operation sequences never leave the lifecycle (property)") {
  Xoshiro256ss rng(67);
  const std::vector<std::string> wallets{"w0", "w1", "w2", "w3"};
  for (int round = 0; round < 60; ++round) {
    Engine e(EngineConfig{TokenAmount::whole(1000), {}, {}});
    for (const auto &w : wallets) {
      e.set_balance(WalletId(w), TokenAmount::whole(100 + rng.next() % 100));
    }
    std::map<std::string, Phase> last;
    Tick now = 0;
    for (int op = 0; op < 150; ++op) {
      now += rng.next() % 2;
      auto id = "p" + std::to_string(rng.next() % 4);
      try {
        switch (rng.next() % 5) {
          case 0: {
            Tick b = now + 1 + rng.next() % 3;
            e.submit(ProposalSpec{ProposalId(id), {"yes", "no"}, {now, b},
                                  {b, b + 1 + rng.next() % 4}, Mechanism::kToken, {}},
                     now);
            break;
          }
          case 1:
            e.open_voting(ProposalId(id), now);
            break;
          case 2:
            e.cast(VoteRecord{WalletId(wallets[rng.next() % 4]), ProposalId(id),
                              rng.next() % 2 ? "yes" : "no",
                              TokenAmount::whole(1 + rng.next() % 120), 0},
                   now);
            break;
          case 3:
            e.finalize(ProposalId(id), now);
            break;
          default:
            e.execute(ProposalId(id), now);
            break;
        }
      } catch (const Error &) {
      }
      for (const auto &[pid, p] : e.proposals()) {
        auto it = last.find(pid.str());
        if (it != last.end() && it->second != p.phase) {
          CHECK(is_allowed_transition(it->second, p.phase));
        }
        last[pid.str()] = p.phase;
      }
      for (const auto &w : wallets) {
        CHECK(e.locked(WalletId(w)) <= e.balance(WalletId(w)));
      }
    }
    CHECK(e.ledger().verify().ok());
    CHECK(Engine::replay(e.ledger().entries()).ledger().head_hash() == e.ledger().head_hash());
  }
}
