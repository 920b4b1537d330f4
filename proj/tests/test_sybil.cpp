#include <doctest.h>

#include "govlab/core/rng.hpp"
#include "govlab/sybil.hpp"
#include "oracle/oracle.hpp"

using namespace govlab;

namespace {

  TokenAmount tok(const char *s) {
    return TokenAmount::parse(s);
  }

  // Brute force: materialize the split and sum per-wallet power.
  VotingPower brute_attack(TokenAmount total, std::uint64_t n, Mechanism m, const SybilTiming &t) {
    VotingPower sum;
    for (auto b : split_uniform(total, n)) {
      sum += mechanism_power(m, b, t.held_since, t.now, t.conviction);
    }
    return sum;
  }

}  // namespace

TEST_CASE("split_uniform examples") {
  auto even = split_uniform(tok("10000"), 100);
  CHECK(even.size() == 100);
  for (auto b : even) {
    CHECK(b.str() == "100.000000000");
  }
  CHECK(split_uniform(tok("42.5"), 1) == std::vector<TokenAmount>{tok("42.5")});
  auto thirds = split_uniform(tok("10"), 3);
  CHECK(thirds[0].str() == "3.333333334");
  CHECK(thirds[1].str() == "3.333333333");
  CHECK(thirds[2].str() == "3.333333333");
  CHECK_THROWS_AS(split_uniform(tok("10"), 0), Error);
  CHECK_THROWS_AS(split_uniform(TokenAmount{}, 3), Error);
  CHECK_THROWS_AS(split_uniform(TokenAmount::from_units(2), 3), Error);
}

TEST_CASE("split_uniform sums exactly (property)") {
  Xoshiro256ss rng(41);
  for (int i = 0; i < 300; ++i) {
    auto total = TokenAmount::from_units(1000 + rng.next() % 1'000'000'000'000'000ULL);
    auto n = 1 + rng.next() % 999;
    auto parts = split_uniform(total, n);
    TokenAmount sum;
    for (auto p : parts) {
      sum += p;
    }
    CHECK(sum == total);
    CHECK(parts.size() == n);
  }
}

TEST_CASE("sybil_gain examples") {
  auto qv = sybil_gain(tok("10000"), 100, Mechanism::kQuadratic);
  CHECK(qv.honest_power.str() == "100.000000000");
  CHECK(qv.attack_power.str() == "1000.000000000");
  CHECK(qv.amplification->str() == "10.000000000");

  auto tv = sybil_gain(tok("10000"), 100, Mechanism::kToken);
  CHECK(tv.honest_power.str() == "10000.000000000");
  CHECK(tv.attack_power.str() == "10000.000000000");
  CHECK(tv.amplification->str() == "1.000000000");

  // Each of the three wallets rounds sqrt(3) separately (1.732050808), so the
  // sum is 5.196152424 rather than round(3 * sqrt(3)) = 5.196152423.
  auto nine = sybil_gain(tok("9"), 3, Mechanism::kQuadratic);
  CHECK(nine.honest_power.str() == "3.000000000");
  CHECK(nine.attack_power.units() == 3 * oracle::sqrt_units(3'000'000'000ULL));
  CHECK(nine.attack_power.str() == "5.196152424");
  CHECK(oracle::within(nine.attack_power.units(), 5'196'152'423ULL, 3));
  CHECK(nine.amplification->str() == "1.732050808");
  CHECK(oracle::within(nine.amplification->units(), oracle::sqrt_of_count_units(3), 3));
}

TEST_CASE("sybil_gain reports undefined amplification at zero honest power") {
  SybilTiming t{5, 5, {0.1}};
  auto r = sybil_gain(tok("100"), 4, Mechanism::kConviction, t);
  CHECK(r.honest_power.is_zero());
  CHECK_FALSE(r.amplification.has_value());
  CHECK(nlohmann::json(r).at("amplification").is_null());
}

TEST_CASE("closed-form attack power equals the materialized split (property)") {
  Xoshiro256ss rng(43);
  const Mechanism mechs[] = {Mechanism::kToken, Mechanism::kQuorum, Mechanism::kQuadratic,
                             Mechanism::kConviction};
  for (int i = 0; i < 400; ++i) {
    auto total = TokenAmount::from_units(1000 + rng.next() % 100'000'000'000'000ULL);
    auto n = 1 + rng.next() % 200;
    auto m = mechs[i % 4];
    SybilTiming t{3, 3 + rng.next() % 50, {0.01 + rng.next_double()}};
    CHECK(sybil_gain(total, n, m, t).attack_power == brute_attack(total, n, m, t));
  }
}

TEST_CASE("split invariance per mechanism (property)") {
  Xoshiro256ss rng(47);
  for (int i = 0; i < 300; ++i) {
    auto total = TokenAmount::from_units(1'000'000 + rng.next() % 1'000'000'000'000'000ULL);
    auto n = 1 + rng.next() % 500;
    auto token = sybil_gain(total, n, Mechanism::kToken);
    CHECK(token.attack_power == token.honest_power);
    CHECK(token.amplification->str() == "1.000000000");

    auto quad = sybil_gain(total, n, Mechanism::kQuadratic);
    CHECK(oracle::within(quad.amplification->units(), oracle::sqrt_of_count_units(n), n));

    SybilTiming t{0, 1 + rng.next() % 100, {0.01 + rng.next_double()}};
    auto conv = sybil_gain(total, n, Mechanism::kConviction, t);
    CHECK(oracle::within(conv.attack_power.units(), conv.honest_power.units(), n));
  }
}

TEST_CASE("best_split examples") {
  auto q = best_split(tok("10000"), Mechanism::kQuadratic, 100);
  CHECK(q.n_wallets == 100);
  CHECK(q.report.amplification->str() == "10.000000000");

  auto t = best_split(tok("12345.678"), Mechanism::kToken, 100);
  CHECK(t.n_wallets == 1);
  CHECK(t.report.amplification->str() == "1.000000000");

  // capped by 1e-9 granularity: 5e-9 tokens support at most 5 wallets
  auto tiny = best_split(TokenAmount::from_units(5), Mechanism::kQuadratic, 1000);
  CHECK(tiny.n_wallets <= 5);

  CHECK_THROWS_AS(best_split(tok("1"), Mechanism::kToken, 0), Error);
}

TEST_CASE("best_split at ten million wallets") {
  auto q = best_split(tok("10000"), Mechanism::kQuadratic, 10'000'000);
  CHECK(q.n_wallets == 10'000'000);
  CHECK(oracle::within(q.report.amplification->units(),
                       oracle::sqrt_of_count_units(10'000'000), 10'000'000));
}

TEST_CASE("best_split agrees with a brute-force scan up to 1e4 wallets") {
  // one brute-force pass gives attack power for every n; the best over every
  // prefix [1, max] is then checked against best_split(max).
  for (auto [total, mech] : {std::pair{tok("10000"), Mechanism::kQuadratic},
                             std::pair{tok("7.000000011"), Mechanism::kQuadratic},
                             std::pair{tok("500"), Mechanism::kToken}}) {
    const std::uint64_t kMax = 10'000;
    SybilTiming t;
    std::vector<VotingPower> attack(kMax + 1);
    for (std::uint64_t n = 1; n <= kMax; ++n) {
      attack[n] = brute_attack(total, n, mech, t);
    }
    std::uint64_t best_n = 1;
    for (std::uint64_t max : {1ULL, 2ULL, 7ULL, 100ULL, 999ULL, 4096ULL, 10'000ULL}) {
      best_n = 1;
      for (std::uint64_t n = 2; n <= max; ++n) {
        if (attack[n] > attack[best_n]) {
          best_n = n;
        }
      }
      auto got = best_split(total, mech, max);
      CAPTURE(max);
      CHECK(got.n_wallets == best_n);
      CHECK(got.report.attack_power == attack[best_n]);
    }
  }
}
