#include "govlab/mechanisms.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace govlab {

  namespace {

    using Real = boost::multiprecision::cpp_bin_float_50;

    std::uint64_t round_half_even(const Real &v) {
      Real q = floor(v);
      Real frac = v - q;
      auto out = q.convert_to<std::uint64_t>();
      if (frac > Real(0.5) || (frac == Real(0.5) && (out & 1) == 1)) {
        ++out;
      }
      return out;
    }

  }  // namespace

  std::string_view mechanism_name(Mechanism m) noexcept {
    switch (m) {
      case Mechanism::kToken:
        return "token";
      case Mechanism::kQuorum:
        return "quorum";
      case Mechanism::kQuadratic:
        return "quadratic";
      case Mechanism::kConviction:
        return "conviction";
    }
    return "unknown";
  }

  Mechanism parse_mechanism(std::string_view name) {
    for (auto m : {Mechanism::kToken, Mechanism::kQuorum, Mechanism::kQuadratic,
                   Mechanism::kConviction}) {
      if (mechanism_name(m) == name) {
        return m;
      }
    }
    throw Error(Errc::kParse,
                "unknown mechanism '" + std::string(name)
                    + "' (expected token, quorum, quadratic or conviction)");
  }

  std::string_view quorum_basis_name(QuorumBasis b) noexcept {
    return b == QuorumBasis::kTokenSupplyFraction ? "token_supply_fraction"
                                                  : "wallet_count_fraction";
  }

  QuorumBasis parse_quorum_basis(std::string_view name) {
    if (name == "token_supply_fraction") {
      return QuorumBasis::kTokenSupplyFraction;
    }
    if (name == "wallet_count_fraction") {
      return QuorumBasis::kWalletCountFraction;
    }
    throw Error(Errc::kParse, "unknown quorum basis '" + std::string(name) + "'");
  }

  void QuorumConfig::validate() const {
    if (threshold > Ratio::whole(1)) {
      throw Error(Errc::kInvalidArgument,
                  "quorum threshold " + threshold.str() + " exceeds 1");
    }
  }

  void to_json(nlohmann::json &j, const QuorumConfig &q) {
    j = nlohmann::json{{"basis", quorum_basis_name(q.basis)},
                       {"threshold", q.threshold}};
  }

  void from_json(const nlohmann::json &j, QuorumConfig &q) {
    q.basis = parse_quorum_basis(j.at("basis").get<std::string>());
    j.at("threshold").get_to(q.threshold);
    q.validate();
  }

  void ConvictionParams::validate() const {
    if (!(decay_rate > 0.0) || !std::isfinite(decay_rate)) {
      throw Error(Errc::kInvalidArgument,
                  "conviction decay_rate must be a positive finite number");
    }
  }

  std::string format_real(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  }

  double parse_real(std::string_view text) {
    double v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
      throw Error(Errc::kParse, "malformed real number '" + std::string(text) + "'");
    }
    return v;
  }

  void to_json(nlohmann::json &j, const ConvictionParams &c) {
    j = nlohmann::json{{"decay_rate", format_real(c.decay_rate)}};
  }

  void from_json(const nlohmann::json &j, ConvictionParams &c) {
    const auto &rate = j.at("decay_rate");
    c.decay_rate = rate.is_string() ? parse_real(rate.get<std::string>())
                                    : rate.get<double>();
    c.validate();
  }

  ConvictionState conviction_state(const VoteRecord &vote) {
    return ConvictionState{vote.wallet, vote.option, vote.committed, vote.cast_at};
  }

  VotingPower power_token(TokenAmount committed) {
    if (committed.is_zero()) {
      throw Error(Errc::kZeroCommitment, "token power of a zero commitment");
    }
    return VotingPower::from_units(committed.units());
  }

  VotingPower power_quadratic(TokenAmount committed) {
    // sqrt(u / 1e9) * 1e9 == sqrt(u * 1e9); (r + 1/2)^2 = r^2 + r + 1/4 so
    // the integer remainder decides rounding and an exact half cannot occur.
    u128 scaled = static_cast<u128>(committed.units()) * kScale;
    u128 r = isqrt(scaled);
    if (scaled - r * r > r) {
      ++r;
    }
    return VotingPower::from_units(narrow_u64(r));
  }

  VotingPower conviction_power(const ConvictionState &state, Tick now,
                               const ConvictionParams &params) {
    params.validate();
    if (now < state.held_since) {
      throw Error(Errc::kInvalidArgument,
                  "conviction evaluated at tick " + std::to_string(now)
                      + " before held_since " + std::to_string(state.held_since));
    }
    Real exponent = Real(params.decay_rate) * Real(now - state.held_since);
    Real factor = -boost::multiprecision::expm1(-exponent);
    return VotingPower::from_units(
        round_half_even(Real(state.tokens.units()) * factor));
  }

  ConvictionState switch_vote(const ConvictionState &state,
                              const OptionLabel &new_option, Tick now) {
    if (new_option == state.option) {
      throw Error(Errc::kInvalidArgument,
                  "switch_vote to the option already held ('" + new_option + "')");
    }
    if (now < state.held_since) {
      throw Error(Errc::kTickRegression, "switch_vote before held_since");
    }
    return ConvictionState{state.wallet, new_option, state.tokens, now};
  }

  VotingPower mechanism_power(Mechanism m, TokenAmount committed,
                              Tick held_since, Tick now,
                              const ConvictionParams &params) {
    switch (m) {
      case Mechanism::kToken:
      case Mechanism::kQuorum:
        return power_token(committed);
      case Mechanism::kQuadratic:
        return power_quadratic(committed);
      case Mechanism::kConviction:
        return conviction_power(ConvictionState{{}, {}, committed, held_since},
                                now, params);
    }
    throw Error(Errc::kInvalidArgument, "unknown mechanism");
  }

  bool quorum_met(const QuorumConfig &quorum, TokenAmount participating_tokens,
                  TokenAmount supply, std::uint64_t participating_wallets,
                  std::uint64_t wallet_universe_size) {
    quorum.validate();
    if (quorum.threshold.is_zero()) {
      return true;
    }
    u128 part = 0;
    u128 base = 0;
    if (quorum.basis == QuorumBasis::kTokenSupplyFraction) {
      part = participating_tokens.units();
      base = supply.units();
    } else {
      part = participating_wallets;
      base = wallet_universe_size;
    }
    if (base == 0) {
      return false;
    }
    // part / base >= threshold, cross-multiplied at the 1e9 scale
    return part * kScale >= static_cast<u128>(quorum.threshold.units()) * base;
  }

  TallyResult tally(std::span<const VoteRecord> votes, const TallyParams &params,
                    TokenAmount supply, std::uint64_t wallet_universe_size,
                    Tick now) {
    if (params.mechanism == Mechanism::kQuorum && !params.quorum) {
      throw Error(Errc::kInvalidArgument,
                  "the quorum mechanism needs a quorum configuration");
    }
    TallyResult result;
    for (const auto &option : params.options) {
      result.per_option_power.emplace(option, VotingPower{});
    }
    std::set<WalletId> wallets;
    for (const auto &vote : votes) {
      validate_vote(vote);
      if (vote.proposal != votes.front().proposal) {
        throw Error(Errc::kMixedProposal,
                    "tally mixes proposals " + votes.front().proposal.str()
                        + " and " + vote.proposal.str());
      }
      if (!wallets.insert(vote.wallet).second) {
        throw Error(Errc::kInvalidArgument,
                    "wallet " + vote.wallet.str() + " has two live votes");
      }
      if (!params.options.empty()
          && !result.per_option_power.contains(vote.option)) {
        throw Error(Errc::kInvalidArgument,
                    "vote for undeclared option '" + vote.option + "'");
      }
      result.participating_tokens += vote.committed;
      result.per_option_power[vote.option] +=
          mechanism_power(params.mechanism, vote.committed, vote.cast_at, now,
                          params.conviction);
    }
    if (supply < result.participating_tokens) {
      throw Error(Errc::kSupplyTooSmall,
                  "supply " + supply.str() + " is below committed total "
                      + result.participating_tokens.str());
    }
    result.participating_wallets = wallets.size();

    if (params.quorum
        && !quorum_met(*params.quorum, result.participating_tokens, supply,
                       result.participating_wallets, wallet_universe_size)) {
      result.outcome = OutcomeKind::kQuorumFailed;
      return result;
    }

    VotingPower best;
    for (const auto &[option, power] : result.per_option_power) {
      best = std::max(best, power);
    }
    for (const auto &[option, power] : result.per_option_power) {
      if (power == best) {
        result.tied.push_back(option);
      }
    }
    if (result.tied.size() == 1 && !best.is_zero()) {
      result.outcome = OutcomeKind::kWinner;
      result.winner = result.tied.front();
      result.tied.clear();
    } else {
      result.outcome = OutcomeKind::kTie;
    }
    return result;
  }

}  // namespace govlab
