#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace govlab {

  enum class Errc {
    kOverflow,
    kUnderflow,
    kInvalidArgument,
    kZeroCommitment,
    kOutOfWindow,
    kInsufficientUnlockedTokens,
    kMixedProposal,
    kSupplyTooSmall,
    kInvalidTransition,
    kDuplicateProposal,
    kUnknownProposal,
    kTickRegression,
    kNonCanonicalPayload,
    kInstanceTooLarge,
    kUndefined,
    kParse,
    kValidation,
  };

  std::string_view errc_name(Errc code) noexcept;

  /// Every failure raised by the library carries a stable code so callers
  /// (the CLI in particular) can map it without string matching.
  class Error : public std::runtime_error {
   public:
    Error(Errc code, const std::string &what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept {
      return code_;
    }

   private:
    Errc code_;
  };

}  // namespace govlab
