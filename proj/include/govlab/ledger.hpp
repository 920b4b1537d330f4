#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace govlab {

  /// Lowercase hex SHA-256 of data.
  std::string sha256_hex(std::string_view data);

  inline const std::string kGenesisPrevHash(64, '0');

  struct LedgerEntry {
    std::uint64_t index = 0;
    std::string prev_hash;
    /// Canonical JSON text of the event, kept byte-for-byte.
    std::string payload;
    std::string hash;

    bool operator==(const LedgerEntry &) const = default;
  };

  /// SHA-256 over decimal(index) || prev_hash || payload.
  std::string entry_hash(std::uint64_t index, std::string_view prev_hash,
                         std::string_view payload);

  /// Canonical means: a JSON object, compact, keys sorted, no floating-point
  /// numbers (quantities travel as decimal strings).
  bool is_canonical_payload(std::string_view payload);

  struct ChainStatus {
    /// Empty when the chain verifies; otherwise the smallest bad index.
    std::optional<std::uint64_t> broken_at;

    bool ok() const {
      return !broken_at.has_value();
    }
  };

  /// Recomputes every hash and link. Truncating the tail is not detectable
  /// here; compare head_hash() against an externally published value.
  ChainStatus verify_chain(std::span<const LedgerEntry> entries);

  /// Append-only hash-chained event log.
  class Ledger {
   public:
    Ledger() = default;
    explicit Ledger(std::vector<LedgerEntry> entries)
        : entries_(std::move(entries)) {}

    /// Throws kNonCanonicalPayload if the payload is not canonical.
    const LedgerEntry &append(std::string payload);
    const LedgerEntry &append(const nlohmann::json &event);
    const LedgerEntry &append(const char *payload) {
      return append(std::string(payload));
    }

    const std::vector<LedgerEntry> &entries() const {
      return entries_;
    }

    std::size_t size() const {
      return entries_.size();
    }

    /// Hash of the last entry, or 64 zeros for an empty log.
    std::string head_hash() const;

    ChainStatus verify() const {
      return verify_chain(entries_);
    }

   private:
    std::vector<LedgerEntry> entries_;
  };

  /// One entry per line, keys hash/index/payload/prev_hash.
  std::string entry_to_line(const LedgerEntry &e);
  LedgerEntry entry_from_line(std::string_view line);

  void write_ledger(std::ostream &out, std::span<const LedgerEntry> entries);
  std::vector<LedgerEntry> read_ledger(std::istream &in);

  void save_ledger(const std::filesystem::path &path,
                   std::span<const LedgerEntry> entries);
  std::vector<LedgerEntry> load_ledger(const std::filesystem::path &path);

}  // namespace govlab
