#include <doctest.h>

#include <algorithm>
#include <random>

#include "govlab/core/rng.hpp"
#include "govlab/core/types.hpp"

using namespace govlab;

TEST_CASE("fixed-precision text form") {
  CHECK(TokenAmount::parse("100").str() == "100.000000000");
  CHECK(TokenAmount::parse("0.000000001").units() == 1);
  CHECK(TokenAmount::parse("3.5").str() == "3.500000000");
  CHECK(TokenAmount::whole(7).str() == "7.000000000");
  CHECK(TokenAmount::from_units(0).str() == "0.000000000");

  for (const char *bad : {"", "-1", "1.", ".5", "1e5", "1.0000000001", "abc", "1,0"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(TokenAmount::parse(bad), Error);
  }
  CHECK_THROWS_AS(TokenAmount::parse("99999999999999999999"), Error);
}

TEST_CASE("subtraction below zero is an error, never saturation") {
  auto a = TokenAmount::whole(1);
  auto b = TokenAmount::whole(2);
  CHECK((b - a) == a);
  try {
    (void)(a - b);
    FAIL("expected underflow");
  } catch (const Error &e) {
    CHECK(e.code() == Errc::kUnderflow);
  }
}

TEST_CASE("addition overflow is a hard error") {
  auto big = VotingPower::from_units(~std::uint64_t{0});
  CHECK_THROWS_AS(big + VotingPower::from_units(1), Error);
}

TEST_CASE("power_sum examples") {
  CHECK(power_sum({}).is_zero());
  std::vector<VotingPower> two{VotingPower::whole(10), VotingPower::whole(100)};
  CHECK(power_sum(two) == VotingPower::whole(110));

  // 1000 copies of 1e-9, against integer arithmetic on scaled units
  std::vector<VotingPower> tiny(1000, VotingPower::from_units(1));
  std::uint64_t expected_units = 0;
  for (std::size_t i = 0; i < tiny.size(); ++i) {
    expected_units += 1;
  }
  CHECK(power_sum(tiny).units() == expected_units);
  CHECK(power_sum(tiny).str() == "0.000001000");

  std::vector<VotingPower> overflow{VotingPower::from_units(~std::uint64_t{0}),
                                    VotingPower::from_units(1)};
  CHECK_THROWS_AS(power_sum(overflow), Error);
}

TEST_CASE("power_sum is order independent (property)") {
  Xoshiro256ss rng(11);
  for (int round = 0; round < 200; ++round) {
    std::vector<VotingPower> xs;
    auto n = 1 + rng.next() % 50;
    for (std::uint64_t i = 0; i < n; ++i) {
      xs.push_back(VotingPower::from_units(rng.next() % 1'000'000'000'000'000ULL));
    }
    auto reference = power_sum(xs);
    std::shuffle(xs.begin(), xs.end(), rng);
    CHECK(power_sum(xs) == reference);
    std::reverse(xs.begin(), xs.end());
    CHECK(power_sum(xs) == reference);
  }
}

TEST_CASE("half-even division") {
  CHECK(div_round_half_even(5, 2) == 2);
  CHECK(div_round_half_even(7, 2) == 4);
  CHECK(div_round_half_even(10, 4) == 2);
  CHECK(div_round_half_even(11, 4) == 3);
  CHECK(div_round_half_even(9, 4) == 2);
  CHECK(ratio_of(1, 3).str() == "0.333333333");
  CHECK(ratio_of(2, 3).str() == "0.666666667");
  CHECK_THROWS_AS(ratio_of(1, 0), Error);
}

TEST_CASE("isqrt is exact") {
  for (u128 n : {u128{0}, u128{1}, u128{2}, u128{3}, u128{4}, u128{15}, u128{16}, u128{17},
                 u128{999999999999}, (u128{1} << 100) + 12345}) {
    u128 r = isqrt(n);
    CHECK(r * r <= n);
    CHECK((r + 1) * (r + 1) > n);
  }
}

TEST_CASE("identifiers") {
  CHECK(is_valid_id("wallet_01-A"));
  CHECK_FALSE(is_valid_id(""));
  CHECK_FALSE(is_valid_id("has space"));
  CHECK_FALSE(is_valid_id("dot.ted"));
  CHECK_FALSE(is_valid_id(std::string(65, 'a')));
  CHECK(is_valid_id(std::string(64, 'a')));
  CHECK_THROWS_AS(WalletId("bad id"), Error);
  // byte-exact comparison, no case folding
  CHECK(WalletId("Alice") != WalletId("alice"));
}

TEST_CASE("vote records reject zero commitments") {
  VoteRecord v{WalletId("w1"), ProposalId("p"), "A", TokenAmount{}, 0};
  try {
    validate_vote(v);
    FAIL("expected ZeroCommitment");
  } catch (const Error &e) {
    CHECK(e.code() == Errc::kZeroCommitment);
  }
}

TEST_CASE("core serialization round-trips byte-exactly") {
  Xoshiro256ss rng(5);
  for (int i = 0; i < 100; ++i) {
    VoteRecord v{WalletId("w" + std::to_string(rng.next() % 1000)), ProposalId("prop-1"),
                 "opt" + std::to_string(rng.next() % 3),
                 TokenAmount::from_units(1 + rng.next() % 1'000'000'000'000ULL),
                 rng.next() % 10000};
    auto text = nlohmann::json(v).dump();
    auto back = nlohmann::json::parse(text).get<VoteRecord>();
    CHECK(back == v);
    CHECK(nlohmann::json(back).dump() == text);
  }
  TallyResult t;
  t.per_option_power = {{"A", VotingPower::whole(3)}, {"B", VotingPower::from_units(7)}};
  t.participating_tokens = TokenAmount::whole(12);
  t.participating_wallets = 2;
  t.outcome = OutcomeKind::kWinner;
  t.winner = "A";
  auto text = nlohmann::json(t).dump();
  CHECK(text.find("\"3.000000000\"") != std::string::npos);
  auto back = nlohmann::json::parse(text).get<TallyResult>();
  CHECK(back == t);
  CHECK(nlohmann::json(back).dump() == text);
}

TEST_CASE("xoshiro256** matches the reference stream") {
  Xoshiro256ss x(std::array<std::uint64_t, 4>{1, 2, 3, 4});
  CHECK(x.next() == 11520ULL);
  CHECK(x.next() == 0ULL);
  CHECK(x.next() == 1509978240ULL);
  CHECK(x.next() == 1215971899390074240ULL);

  // splitmix64 seeding, values from an independent implementation
  Xoshiro256ss s(42);
  CHECK(s.next() == 1546998764402558742ULL);
  CHECK(s.next() == 6990951692964543102ULL);
  CHECK(s.next() == 12544586762248559009ULL);
}
