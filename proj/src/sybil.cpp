#include "govlab/sybil.hpp"

namespace govlab {

  namespace {

    VotingPower power_of(TokenAmount tokens, Mechanism m, const SybilTiming &t) {
      return mechanism_power(m, tokens, t.held_since, t.now, t.conviction);
    }

    void check_split(TokenAmount total, std::uint64_t n) {
      if (n == 0) {
        throw Error(Errc::kInvalidArgument, "cannot split across zero wallets");
      }
      if (total.is_zero()) {
        throw Error(Errc::kZeroCommitment, "cannot split a zero total");
      }
      if (n > total.units()) {
        throw Error(Errc::kInvalidArgument,
                    "split of " + total.str() + " across " + std::to_string(n)
                        + " wallets leaves wallets below 1e-9 tokens");
      }
    }

    // Same value as summing power over split_uniform, without materializing
    // the n balances: the split has one head balance and n-1 equal ones.
    VotingPower attack_power(TokenAmount total, std::uint64_t n, Mechanism m,
                             const SybilTiming &t) {
      std::uint64_t base = total.units() / n;
      std::uint64_t head = base + total.units() % n;
      VotingPower sum = power_of(TokenAmount::from_units(head), m, t);
      if (n > 1) {
        VotingPower each = power_of(TokenAmount::from_units(base), m, t);
        sum += VotingPower::from_units(narrow_u64(mul_checked(each.units(), n - 1)));
      }
      return sum;
    }

    SybilReport make_report(VotingPower honest, VotingPower attack) {
      SybilReport r{honest, attack, std::nullopt};
      if (!honest.is_zero()) {
        r.amplification = ratio_of(attack.units(), honest.units());
      }
      return r;
    }

  }  // namespace

  void to_json(nlohmann::json &j, const SybilReport &r) {
    j = nlohmann::json{
        {"honest_power", r.honest_power},
        {"attack_power", r.attack_power},
        {"amplification",
         r.amplification ? nlohmann::json(*r.amplification) : nlohmann::json()}};
  }

  std::vector<TokenAmount> split_uniform(TokenAmount total, std::uint64_t n) {
    check_split(total, n);
    std::uint64_t base = total.units() / n;
    std::vector<TokenAmount> out(n, TokenAmount::from_units(base));
    out.front() = TokenAmount::from_units(base + total.units() % n);
    return out;
  }

  SybilReport sybil_gain(TokenAmount total, std::uint64_t n, Mechanism mechanism,
                         const SybilTiming &timing) {
    check_split(total, n);
    return make_report(power_of(total, mechanism, timing),
                       attack_power(total, n, mechanism, timing));
  }

  BestSplit best_split(TokenAmount total, Mechanism mechanism,
                       std::uint64_t max_wallets, const SybilTiming &timing) {
    if (max_wallets == 0) {
      throw Error(Errc::kInvalidArgument, "max_wallets must be at least 1");
    }
    check_split(total, 1);
    std::uint64_t limit = std::min(max_wallets, total.units());
    VotingPower honest = power_of(total, mechanism, timing);
    std::uint64_t best_n = 1;
    VotingPower best = honest;
    for (std::uint64_t n = 2; n <= limit; ++n) {
      VotingPower p = attack_power(total, n, mechanism, timing);
      if (p > best) {
        best = p;
        best_n = n;
      }
    }
    return BestSplit{best_n, make_report(honest, best)};
  }

}  // namespace govlab
