#include "govlab/identity.hpp"

#include <algorithm>
#include <cmath>

namespace govlab {

  std::string_view registry_mode_name(RegistryMode m) noexcept {
    return m == RegistryMode::kStrictOneWallet ? "strict_one_wallet"
                                               : "collapse_per_identity";
  }

  RegistryMode parse_registry_mode(std::string_view name) {
    if (name == "strict_one_wallet") {
      return RegistryMode::kStrictOneWallet;
    }
    if (name == "collapse_per_identity") {
      return RegistryMode::kCollapsePerIdentity;
    }
    throw Error(Errc::kParse, "unknown registry mode '" + std::string(name) + "'");
  }

  std::string_view policy_name(UnverifiedPolicy p) noexcept {
    return p == UnverifiedPolicy::kDropUnverified ? "drop_unverified"
                                                  : "admit_unverified";
  }

  UnverifiedPolicy parse_policy(std::string_view name) {
    if (name == "drop_unverified") {
      return UnverifiedPolicy::kDropUnverified;
    }
    if (name == "admit_unverified") {
      return UnverifiedPolicy::kAdmitUnverified;
    }
    throw Error(Errc::kParse, "unknown unverified policy '" + std::string(name) + "'");
  }

  std::string_view reject_reason_name(RejectReason r) noexcept {
    switch (r) {
      case RejectReason::kDuplicateIdentity:
        return "DuplicateIdentity";
      case RejectReason::kWalletAlreadyBound:
        return "WalletAlreadyBound";
      case RejectReason::kProviderRejected:
        return "ProviderRejected";
    }
    return "Unknown";
  }

  void ProviderParams::validate() const {
    if (!(false_accept_rate >= 0.0 && false_accept_rate <= 1.0)) {
      throw Error(Errc::kInvalidArgument, "false_accept_rate must lie in [0, 1]");
    }
  }

  SimulatedProvider::SimulatedProvider(ProviderParams params)
      : params_(params), rng_(params.seed) {
    params_.validate();
  }

  bool SimulatedProvider::verify(const IdentityClaim &claim) {
    if (claim.genuine) {
      return true;
    }
    return rng_.next_double() < params_.false_accept_rate;
  }

  VerificationOutcome IdentityRegistry::bind(const IdentityId &identity,
                                             const WalletId &wallet) {
    VerificationOutcome out{wallet, identity, false, std::nullopt};
    if (auto it = owner_.find(wallet); it != owner_.end()) {
      if (it->second == identity) {
        out.accepted = true;
      } else {
        out.reason = RejectReason::kWalletAlreadyBound;
      }
      return out;
    }
    auto &wallets = bindings_[identity];
    if (mode_ == RegistryMode::kStrictOneWallet && !wallets.empty()) {
      out.reason = RejectReason::kDuplicateIdentity;
      return out;
    }
    wallets.insert(wallet);
    owner_.emplace(wallet, identity);
    out.accepted = true;
    return out;
  }

  VerificationOutcome IdentityRegistry::bind_verified(const IdentityClaim &claim,
                                                      SimulatedProvider &provider) {
    if (!provider.verify(claim)) {
      return VerificationOutcome{claim.wallet, claim.identity, false,
                                 RejectReason::kProviderRejected};
    }
    return bind(claim.identity, claim.wallet);
  }

  std::optional<IdentityId> IdentityRegistry::identity_of(const WalletId &wallet) const {
    if (auto it = owner_.find(wallet); it != owner_.end()) {
      return it->second;
    }
    return std::nullopt;
  }

  const std::set<WalletId> &IdentityRegistry::wallets_of(const IdentityId &identity) const {
    static const std::set<WalletId> kNone;
    auto it = bindings_.find(identity);
    return it == bindings_.end() ? kNone : it->second;
  }

  void IdentityRegistry::check_invariants() const {
    std::size_t seen = 0;
    for (const auto &[identity, wallets] : bindings_) {
      if (mode_ == RegistryMode::kStrictOneWallet && wallets.size() > 1) {
        throw Error(Errc::kInvalidArgument,
                    "identity " + identity.str() + " holds several wallets");
      }
      for (const auto &w : wallets) {
        auto it = owner_.find(w);
        if (it == owner_.end() || it->second != identity) {
          throw Error(Errc::kInvalidArgument,
                      "wallet " + w.str() + " is bound inconsistently");
        }
      }
      seen += wallets.size();
    }
    if (seen != owner_.size()) {
      throw Error(Errc::kInvalidArgument, "a wallet appears under two identities");
    }
  }

  void to_json(nlohmann::json &j, const IdentityRegistry &r) {
    auto bindings = nlohmann::json::array();
    for (const auto &[identity, wallets] : r.bindings()) {
      if (wallets.empty()) {
        continue;
      }
      bindings.push_back({{"identity", identity}, {"wallets", wallets}});
    }
    j = nlohmann::json{{"mode", registry_mode_name(r.mode())},
                       {"bindings", std::move(bindings)}};
  }

  IdentityRegistry registry_from_json(const nlohmann::json &j) {
    IdentityRegistry r(parse_registry_mode(j.at("mode").get<std::string>()));
    for (const auto &b : j.at("bindings")) {
      auto identity = b.at("identity").get<IdentityId>();
      for (const auto &w : b.at("wallets")) {
        auto outcome = r.bind(identity, w.get<WalletId>());
        if (!outcome.accepted) {
          throw Error(Errc::kInvalidArgument,
                      "registry import: binding " + identity.str() + " -> "
                          + outcome.wallet.str() + " rejected ("
                          + std::string(reject_reason_name(*outcome.reason)) + ")");
        }
      }
    }
    return r;
  }

  FilterResult filter_and_collapse(std::span<const VoteRecord> votes,
                                   const IdentityRegistry &registry,
                                   UnverifiedPolicy policy) {
    FilterResult out;
    std::map<IdentityId, std::vector<const VoteRecord *>> groups;
    for (const auto &vote : votes) {
      if (vote.proposal != votes.front().proposal) {
        throw Error(Errc::kMixedProposal,
                    "identity filter over votes for several proposals");
      }
      if (auto identity = registry.identity_of(vote.wallet)) {
        groups[*identity].push_back(&vote);
      } else if (policy == UnverifiedPolicy::kAdmitUnverified) {
        out.votes.push_back(vote);
      } else {
        out.dropped_unverified.push_back(vote.wallet);
      }
    }
    for (const auto &[identity, group] : groups) {
      const auto &first = *group.front();
      bool equivocates = std::any_of(group.begin(), group.end(),
                                     [&](const VoteRecord *v) {
                                       return v->option != first.option;
                                     });
      if (equivocates) {
        out.equivocating.push_back(identity);
        continue;
      }
      VoteRecord merged = first;
      for (auto it = group.begin() + 1; it != group.end(); ++it) {
        const auto &v = **it;
        merged.wallet = std::min(merged.wallet, v.wallet);
        merged.committed += v.committed;
        merged.cast_at = std::max(merged.cast_at, v.cast_at);
      }
      out.votes.push_back(std::move(merged));
    }
    std::sort(out.votes.begin(), out.votes.end(),
              [](const VoteRecord &a, const VoteRecord &b) {
                return a.wallet < b.wallet;
              });
    std::sort(out.dropped_unverified.begin(), out.dropped_unverified.end());
    return out;
  }

}  // namespace govlab
