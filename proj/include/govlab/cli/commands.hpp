#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace govlab::cli {

  /// Process exit codes; stable across releases.
  enum ExitStatus : int {
    kOk = 0,
    kValidationFailure = 1,
    kRuntimeError = 2,
    kLedgerBroken = 3,
  };

  struct Streams {
    std::ostream &out;
    std::ostream &err;
    bool color = false;
  };

  struct RunOptions {
    std::filesystem::path scenario;
    std::filesystem::path out;
    /// Defaults to the report path with extension .ledger.jsonl.
    std::optional<std::filesystem::path> ledger;
    std::optional<std::filesystem::path> csv;
    std::optional<std::uint64_t> seed;
  };

  struct CompareOptions {
    std::filesystem::path scenario;
    std::vector<std::string> mechanisms;
    std::filesystem::path out;
    std::optional<std::uint64_t> seed;
  };

  std::filesystem::path default_ledger_path(const std::filesystem::path &report);

  int cmd_validate(const std::filesystem::path &scenario, Streams io);
  int cmd_run(const RunOptions &opts, Streams io);
  int cmd_compare(const CompareOptions &opts, Streams io);
  int cmd_verify(const std::filesystem::path &ledger, Streams io);

  /// Full command line entry point (argument parsing included).
  int main(int argc, char **argv, Streams io);

  /// Styled output unless GOVLAB_NO_COLOR is set or stdout is not a terminal.
  bool color_enabled();

}  // namespace govlab::cli
