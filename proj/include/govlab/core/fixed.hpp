#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "govlab/core/error.hpp"

namespace govlab {

  using u128 = unsigned __int128;

  /// Decimal scale shared by every fixed-precision quantity: 10^9 units per 1.
  inline constexpr std::uint64_t kScale = 1'000'000'000ULL;
  inline constexpr int kFractionDigits = 9;

  /// num / den rounded to nearest, ties to even. den must be non-zero.
  u128 div_round_half_even(u128 num, u128 den);

  /// Checked a * b; throws kOverflow when the product does not fit 128 bits.
  u128 mul_checked(u128 a, u128 b);

  /// Narrow to 64 bits or throw kOverflow.
  std::uint64_t narrow_u64(u128 v);

  /// Largest r with r*r <= n.
  u128 isqrt(u128 n);

  std::string format_units(std::uint64_t units);
  std::uint64_t parse_units(std::string_view text);

  /// Non-negative decimal with exactly nine fractional digits, stored as an
  /// integer count of 10^-9 units. Arithmetic is exact; leaving the range
  /// (below zero or above 2^64-1 units) is an error, never saturation.
  template <class Tag>
  class Fixed {
   public:
    constexpr Fixed() = default;

    static constexpr Fixed from_units(std::uint64_t units) {
      Fixed f;
      f.units_ = units;
      return f;
    }

    static Fixed whole(std::uint64_t n) {
      return from_units(narrow_u64(mul_checked(n, kScale)));
    }

    static Fixed parse(std::string_view text) {
      return from_units(parse_units(text));
    }

    constexpr std::uint64_t units() const {
      return units_;
    }

    constexpr bool is_zero() const {
      return units_ == 0;
    }

    std::string str() const {
      return format_units(units_);
    }

    /// Nearest double; for reporting and seeding only, never for tallies.
    double to_double() const {
      return static_cast<double>(units_) / static_cast<double>(kScale);
    }

    Fixed operator+(Fixed rhs) const {
      std::uint64_t out;
      if (__builtin_add_overflow(units_, rhs.units_, &out)) {
        throw Error(Errc::kOverflow, "fixed-precision addition overflow");
      }
      return from_units(out);
    }

    Fixed operator-(Fixed rhs) const {
      if (rhs.units_ > units_) {
        throw Error(Errc::kUnderflow,
                    "fixed-precision subtraction below zero: " + str() + " - "
                        + rhs.str());
      }
      return from_units(units_ - rhs.units_);
    }

    Fixed &operator+=(Fixed rhs) {
      return *this = *this + rhs;
    }

    Fixed &operator-=(Fixed rhs) {
      return *this = *this - rhs;
    }

    constexpr auto operator<=>(const Fixed &) const = default;

   private:
    std::uint64_t units_ = 0;
  };

  struct TokenTag {};
  struct PowerTag {};
  struct RatioTag {};

  /// Governance tokens committed or held.
  using TokenAmount = Fixed<TokenTag>;
  /// Votes produced by a mechanism's power function.
  using VotingPower = Fixed<PowerTag>;
  /// Dimensionless ratio (thresholds, fractions, amplification, Gini).
  using Ratio = Fixed<RatioTag>;

  template <class Tag>
  void to_json(nlohmann::json &j, const Fixed<Tag> &f) {
    j = f.str();
  }

  template <class Tag>
  void from_json(const nlohmann::json &j, Fixed<Tag> &f) {
    if (!j.is_string()) {
      throw Error(Errc::kParse,
                  "decimal quantity must be a string, got " + j.dump());
    }
    f = Fixed<Tag>::parse(j.get<std::string>());
  }

  /// num/den as a half-even rounded 9-digit ratio.
  Ratio ratio_of(std::uint64_t num_units, std::uint64_t den_units);

}  // namespace govlab
