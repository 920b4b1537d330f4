#include "govlab/core/fixed.hpp"

#include <cmath>
#include <limits>

namespace govlab {

  std::string_view errc_name(Errc code) noexcept {
    switch (code) {
      case Errc::kOverflow:
        return "Overflow";
      case Errc::kUnderflow:
        return "Underflow";
      case Errc::kInvalidArgument:
        return "InvalidArgument";
      case Errc::kZeroCommitment:
        return "ZeroCommitment";
      case Errc::kOutOfWindow:
        return "OutOfWindow";
      case Errc::kInsufficientUnlockedTokens:
        return "InsufficientUnlockedTokens";
      case Errc::kMixedProposal:
        return "MixedProposal";
      case Errc::kSupplyTooSmall:
        return "SupplyTooSmall";
      case Errc::kInvalidTransition:
        return "InvalidTransition";
      case Errc::kDuplicateProposal:
        return "DuplicateProposal";
      case Errc::kUnknownProposal:
        return "UnknownProposal";
      case Errc::kTickRegression:
        return "TickRegression";
      case Errc::kNonCanonicalPayload:
        return "NonCanonicalPayload";
      case Errc::kInstanceTooLarge:
        return "InstanceTooLarge";
      case Errc::kUndefined:
        return "Undefined";
      case Errc::kParse:
        return "Parse";
      case Errc::kValidation:
        return "Validation";
    }
    return "Unknown";
  }

  u128 div_round_half_even(u128 num, u128 den) {
    if (den == 0) {
      throw Error(Errc::kInvalidArgument, "division by zero");
    }
    u128 q = num / den;
    u128 r = num % den;
    // compare 2r with den without overflowing
    u128 half_gap = den - r;
    if (r > half_gap || (r == half_gap && (q & 1) == 1)) {
      ++q;
    }
    return q;
  }

  u128 mul_checked(u128 a, u128 b) {
    u128 out;
    if (__builtin_mul_overflow(a, b, &out)) {
      throw Error(Errc::kOverflow, "fixed-precision multiplication overflow");
    }
    return out;
  }

  std::uint64_t narrow_u64(u128 v) {
    if (v > std::numeric_limits<std::uint64_t>::max()) {
      throw Error(Errc::kOverflow, "value exceeds fixed-precision range");
    }
    return static_cast<std::uint64_t>(v);
  }

  u128 isqrt(u128 n) {
    if (n < 2) {
      return n;
    }
    // long double seed, then exact integer correction
    auto guess = static_cast<u128>(std::sqrt(static_cast<long double>(n)));
    u128 r = guess;
    auto sq_gt = [n](u128 x) {
      u128 sq;
      return __builtin_mul_overflow(x, x, &sq) || sq > n;
    };
    while (sq_gt(r)) {
      --r;
    }
    while (!sq_gt(r + 1)) {
      ++r;
    }
    return r;
  }

  std::string format_units(std::uint64_t units) {
    std::string frac = std::to_string(units % kScale);
    frac.insert(0, kFractionDigits - frac.size(), '0');
    return std::to_string(units / kScale) + "." + frac;
  }

  std::uint64_t parse_units(std::string_view text) {
    auto fail = [&text]() -> Error {
      return Error(Errc::kParse,
                   "malformed decimal '" + std::string(text)
                       + "': expected digits with at most 9 fractional digits");
    };
    if (text.empty()) {
      throw fail();
    }
    auto dot = text.find('.');
    std::string_view int_part = text.substr(0, dot);
    std::string_view frac_part =
        dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (int_part.empty()
        || (dot != std::string_view::npos && frac_part.empty())
        || frac_part.size() > static_cast<std::size_t>(kFractionDigits)) {
      throw fail();
    }
    u128 whole = 0;
    for (char c : int_part) {
      if (c < '0' || c > '9') {
        throw fail();
      }
      whole = whole * 10 + static_cast<unsigned>(c - '0');
      if (whole > std::numeric_limits<std::uint64_t>::max()) {
        throw Error(Errc::kOverflow, "decimal out of range: " + std::string(text));
      }
    }
    std::uint64_t frac = 0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(kFractionDigits); ++i) {
      frac *= 10;
      if (i < frac_part.size()) {
        char c = frac_part[i];
        if (c < '0' || c > '9') {
          throw fail();
        }
        frac += static_cast<unsigned>(c - '0');
      }
    }
    return narrow_u64(mul_checked(whole, kScale) + frac);
  }

  Ratio ratio_of(std::uint64_t num_units, std::uint64_t den_units) {
    if (den_units == 0) {
      throw Error(Errc::kUndefined, "ratio with zero denominator");
    }
    return Ratio::from_units(narrow_u64(
        div_round_half_even(mul_checked(num_units, kScale), den_units)));
  }

}  // namespace govlab
