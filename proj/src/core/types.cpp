#include "govlab/core/types.hpp"

namespace govlab {

  bool is_valid_id(std::string_view text) noexcept {
    if (text.empty() || text.size() > kMaxIdLength) {
      return false;
    }
    for (char c : text) {
      bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z')
             || (c >= '0' && c <= '9') || c == '_' || c == '-';
      if (!ok) {
        return false;
      }
    }
    return true;
  }

  void validate_vote(const VoteRecord &vote) {
    if (vote.option.empty()) {
      throw Error(Errc::kInvalidArgument,
                  "vote by " + vote.wallet.str() + " has an empty option label");
    }
    if (vote.committed.is_zero()) {
      throw Error(Errc::kZeroCommitment,
                  "vote by " + vote.wallet.str() + " commits zero tokens");
    }
  }

  void to_json(nlohmann::json &j, const VoteRecord &v) {
    j = nlohmann::json{{"wallet", v.wallet},
                       {"proposal", v.proposal},
                       {"option", v.option},
                       {"committed", v.committed},
                       {"cast_at", v.cast_at}};
  }

  void from_json(const nlohmann::json &j, VoteRecord &v) {
    j.at("wallet").get_to(v.wallet);
    j.at("proposal").get_to(v.proposal);
    j.at("option").get_to(v.option);
    j.at("committed").get_to(v.committed);
    j.at("cast_at").get_to(v.cast_at);
  }

  VotingPower TallyResult::total_power() const {
    VotingPower total;
    for (const auto &[option, power] : per_option_power) {
      total += power;
    }
    return total;
  }

  std::string_view outcome_name(OutcomeKind kind) noexcept {
    switch (kind) {
      case OutcomeKind::kWinner:
        return "winner";
      case OutcomeKind::kTie:
        return "tie";
      case OutcomeKind::kQuorumFailed:
        return "quorum_failed";
    }
    return "unknown";
  }

  void to_json(nlohmann::json &j, const TallyResult &t) {
    j = nlohmann::json{
        {"per_option_power", t.per_option_power},
        {"participating_tokens", t.participating_tokens},
        {"participating_wallets", t.participating_wallets},
        {"outcome", outcome_name(t.outcome)},
        {"winner", t.winner ? nlohmann::json(*t.winner) : nlohmann::json()},
        {"tied", t.tied}};
  }

  void from_json(const nlohmann::json &j, TallyResult &t) {
    j.at("per_option_power").get_to(t.per_option_power);
    j.at("participating_tokens").get_to(t.participating_tokens);
    j.at("participating_wallets").get_to(t.participating_wallets);
    auto name = j.at("outcome").get<std::string>();
    if (name == "winner") {
      t.outcome = OutcomeKind::kWinner;
    } else if (name == "tie") {
      t.outcome = OutcomeKind::kTie;
    } else if (name == "quorum_failed") {
      t.outcome = OutcomeKind::kQuorumFailed;
    } else {
      throw Error(Errc::kParse, "unknown tally outcome '" + name + "'");
    }
    const auto &w = j.at("winner");
    t.winner = w.is_null() ? std::nullopt
                           : std::optional<OptionLabel>(w.get<std::string>());
    j.at("tied").get_to(t.tied);
  }

  VotingPower power_sum(std::span<const VotingPower> powers) {
    VotingPower total;
    for (auto p : powers) {
      total += p;
    }
    return total;
  }

}  // namespace govlab
