#include "govlab/ledger.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <openssl/evp.h>

#include "govlab/core/error.hpp"

namespace govlab {

  namespace {

    bool has_float(const nlohmann::json &j) {
      if (j.is_number_float()) {
        return true;
      }
      if (j.is_structured()) {
        for (const auto &child : j) {
          if (has_float(child)) {
            return true;
          }
        }
      }
      return false;
    }

  }  // namespace

  std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr)
        != 1) {
      throw Error(Errc::kInvalidArgument, "SHA-256 digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(kHex[digest[i] >> 4]);
      out.push_back(kHex[digest[i] & 0xf]);
    }
    return out;
  }

  std::string entry_hash(std::uint64_t index, std::string_view prev_hash,
                         std::string_view payload) {
    std::string preimage = std::to_string(index);
    preimage.append(prev_hash);
    preimage.append(payload);
    return sha256_hex(preimage);
  }

  bool is_canonical_payload(std::string_view payload) {
    auto parsed = nlohmann::json::parse(payload, nullptr, false);
    return !parsed.is_discarded() && parsed.is_object() && !has_float(parsed)
        && parsed.dump() == payload;
  }

  ChainStatus verify_chain(std::span<const LedgerEntry> entries) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto &e = entries[i];
      const std::string &expected_prev =
          i == 0 ? kGenesisPrevHash : entries[i - 1].hash;
      if (e.index != i || e.prev_hash != expected_prev
          || e.hash != entry_hash(e.index, e.prev_hash, e.payload)) {
        return ChainStatus{i};
      }
    }
    return ChainStatus{};
  }

  const LedgerEntry &Ledger::append(std::string payload) {
    if (!is_canonical_payload(payload)) {
      throw Error(Errc::kNonCanonicalPayload,
                  "ledger payload is not canonical JSON: " + payload);
    }
    LedgerEntry e;
    e.index = entries_.size();
    e.prev_hash = entries_.empty() ? kGenesisPrevHash : entries_.back().hash;
    e.payload = std::move(payload);
    e.hash = entry_hash(e.index, e.prev_hash, e.payload);
    entries_.push_back(std::move(e));
    return entries_.back();
  }

  const LedgerEntry &Ledger::append(const nlohmann::json &event) {
    return append(event.dump());
  }

  std::string Ledger::head_hash() const {
    return entries_.empty() ? kGenesisPrevHash : entries_.back().hash;
  }

  std::string entry_to_line(const LedgerEntry &e) {
    return nlohmann::json{{"hash", e.hash},
                          {"index", e.index},
                          {"payload", e.payload},
                          {"prev_hash", e.prev_hash}}
        .dump();
  }

  LedgerEntry entry_from_line(std::string_view line) {
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw Error(Errc::kParse, "ledger line is not a JSON object");
    }
    try {
      LedgerEntry e;
      j.at("index").get_to(e.index);
      j.at("prev_hash").get_to(e.prev_hash);
      j.at("payload").get_to(e.payload);
      j.at("hash").get_to(e.hash);
      return e;
    } catch (const nlohmann::json::exception &ex) {
      throw Error(Errc::kParse, std::string("malformed ledger entry: ") + ex.what());
    }
  }

  void write_ledger(std::ostream &out, std::span<const LedgerEntry> entries) {
    for (const auto &e : entries) {
      out << entry_to_line(e) << '\n';
    }
  }

  std::vector<LedgerEntry> read_ledger(std::istream &in) {
    std::vector<LedgerEntry> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) {
        continue;
      }
      try {
        out.push_back(entry_from_line(line));
      } catch (const Error &ex) {
        throw Error(Errc::kParse,
                    "line " + std::to_string(line_no) + ": " + ex.what());
      }
    }
    return out;
  }

  void save_ledger(const std::filesystem::path &path,
                   std::span<const LedgerEntry> entries) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(Errc::kInvalidArgument, "cannot write " + path.string());
    }
    write_ledger(out, entries);
  }

  std::vector<LedgerEntry> load_ledger(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw Error(Errc::kParse, "cannot read " + path.string());
    }
    return read_ledger(in);
  }

}  // namespace govlab
