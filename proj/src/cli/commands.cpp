#include "govlab/cli/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <unistd.h>

#include <CLI11.hpp>

#include "govlab/simulation/runner.hpp"

namespace govlab::cli {

  namespace fs = std::filesystem;
  using nlohmann::json;

  namespace {

    std::string styled(const Streams &io, std::string_view text, const char *ansi) {
      if (!io.color) {
        return std::string(text);
      }
      return std::string(ansi) + std::string(text) + "\x1b[0m";
    }

    void write_file(const fs::path &path, const std::string &content) {
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!out) {
        throw Error(Errc::kInvalidArgument, "cannot write " + path.string());
      }
      out << content;
      if (!out) {
        throw Error(Errc::kInvalidArgument, "write failed for " + path.string());
      }
    }

    void report_validation(const sim::ValidationError &ex, const Streams &io) {
      io.err << "scenario validation failed (" << ex.problems().size() << " problem"
             << (ex.problems().size() == 1 ? "" : "s") << "):\n";
      for (const auto &p : ex.problems()) {
        io.err << "  " << p << '\n';
      }
    }

    /// Wraps a command body with the exit-code contract.
    template <class F>
    int guarded(const Streams &io, F &&body) {
      try {
        return body();
      } catch (const sim::ValidationError &ex) {
        report_validation(ex, io);
        return kValidationFailure;
      } catch (const Error &ex) {
        io.err << "error [" << errc_name(ex.code()) << "]: " << ex.what() << '\n';
        return kRuntimeError;
      } catch (const std::exception &ex) {
        io.err << "error: " << ex.what() << '\n';
        return kRuntimeError;
      }
    }

    sim::Scenario load(const fs::path &path, std::optional<std::uint64_t> seed) {
      auto s = sim::load_scenario(path);
      if (seed) {
        s.seed = *seed;
      }
      return s;
    }

    const char *phase_color(Phase p) {
      switch (p) {
        case Phase::kPassed:
        case Phase::kExecuted:
          return "\x1b[32m";
        case Phase::kQuorumFailed:
          return "\x1b[33m";
        default:
          return "\x1b[31m";
      }
    }

  }  // namespace

  bool color_enabled() {
    return std::getenv("GOVLAB_NO_COLOR") == nullptr && ::isatty(STDOUT_FILENO) == 1;
  }

  fs::path default_ledger_path(const fs::path &report) {
    fs::path p = report;
    p.replace_extension(".ledger.jsonl");
    return p;
  }

  int cmd_validate(const fs::path &scenario, Streams io) {
    return guarded(io, [&] {
      auto s = sim::load_scenario(scenario);
      io.out << "valid " << s.name << '\n';
      return kOk;
    });
  }

  int cmd_run(const RunOptions &opts, Streams io) {
    return guarded(io, [&] {
      auto scenario = load(opts.scenario, opts.seed);
      auto result = sim::run(scenario);
      auto ledger_path = opts.ledger.value_or(default_ledger_path(opts.out));
      write_file(opts.out, sim::report_text(result.report));
      save_ledger(ledger_path, result.ledger);
      if (opts.csv) {
        write_file(*opts.csv, sim::agent_powers_csv(result));
      }
      io.out << "scenario " << scenario.name << '\n';
      for (const auto &p : result.report.at("proposals")) {
        auto phase = parse_phase(p.at("phase").get<std::string>());
        io.out << "proposal " << p.at("id").get<std::string>() << ' '
               << styled(io, phase_name(phase), phase_color(phase)) << '\n';
      }
      const auto &amp = result.report.at("sybil_amplification");
      if (!amp.is_null()) {
        io.out << "sybil_amplification " << amp.get<std::string>() << '\n';
      }
      io.out << "report " << opts.out.string() << '\n';
      io.out << "ledger " << ledger_path.string() << '\n';
      io.out << result.head_hash << '\n';
      return kOk;
    });
  }

  int cmd_compare(const CompareOptions &opts, Streams io) {
    return guarded(io, [&] {
      if (opts.mechanisms.empty()) {
        throw Error(Errc::kInvalidArgument, "no mechanisms to compare");
      }
      auto base = load(opts.scenario, opts.seed);
      std::vector<Mechanism> mechanisms;
      std::vector<std::string> problems;
      std::vector<sim::Scenario> variants;
      for (const auto &name : opts.mechanisms) {
        auto m = parse_mechanism(name);
        try {
          variants.push_back(sim::with_mechanism(base, m));
          mechanisms.push_back(m);
        } catch (const sim::ValidationError &ex) {
          for (const auto &p : ex.problems()) {
            problems.push_back("under " + name + ": " + p);
          }
        }
      }
      if (!problems.empty()) {
        throw sim::ValidationError(std::move(problems));
      }

      std::vector<sim::RunResult> results;
      for (const auto &v : variants) {
        results.push_back(sim::run(v));
      }

      bool has_conviction = std::find(mechanisms.begin(), mechanisms.end(),
                                      Mechanism::kConviction) != mechanisms.end();
      json rows = json::array();
      json reports = json::object();
      for (std::size_t i = 0; i < results.size(); ++i) {
        const auto &r = results[i].report;
        json outcomes = json::object();
        json conviction = json::object();
        for (const auto &p : r.at("proposals")) {
          outcomes[p.at("id").get<std::string>()] = p.at("phase");
          if (!p.at("conviction").is_null()) {
            conviction[p.at("id").get<std::string>()] = p.at("conviction").at("at_finalize");
          }
        }
        json row{{"mechanism", mechanism_name(mechanisms[i])},
                 {"outcomes", outcomes},
                 {"power_gini", r.at("power_gini")},
                 {"sybil_amplification", r.at("sybil_amplification")},
                 {"head_hash", results[i].head_hash}};
        if (has_conviction) {
          row["conviction_at_finalize"] =
              mechanisms[i] == Mechanism::kConviction ? conviction : json();
        }
        rows.push_back(std::move(row));
        reports[std::string(mechanism_name(mechanisms[i]))] = r;
      }

      if (results.size() == 1) {
        write_file(opts.out, sim::report_text(results.front().report));
      } else {
        write_file(opts.out, sim::report_text(json{{"scenario", base.name},
                                                   {"comparison", rows},
                                                   {"reports", reports}}));
      }

      auto cell = [](const json &v) {
        return v.is_null() ? std::string("-") : v.get<std::string>();
      };
      io.out << std::left << std::setw(12) << "mechanism" << std::setw(14) << "gini"
             << std::setw(14) << "amplification" << "outcomes\n";
      for (const auto &row : rows) {
        std::string outcomes;
        for (const auto &[id, phase] : row.at("outcomes").items()) {
          outcomes += (outcomes.empty() ? "" : " ") + id + "=" + phase.get<std::string>();
        }
        io.out << std::left << std::setw(12) << row.at("mechanism").get<std::string>()
               << std::setw(14) << cell(row.at("power_gini")) << std::setw(14)
               << cell(row.at("sybil_amplification")) << outcomes << '\n';
      }
      io.out << "report " << opts.out.string() << '\n';
      for (const auto &row : rows) {
        io.out << "head " << row.at("mechanism").get<std::string>() << ' '
               << row.at("head_hash").get<std::string>() << '\n';
      }
      return kOk;
    });
  }

  int cmd_verify(const fs::path &ledger, Streams io) {
    return guarded(io, [&] {
      auto entries = load_ledger(ledger);
      auto status = verify_chain(entries);
      if (!status.ok()) {
        io.err << styled(io, "ledger broken", "\x1b[31m") << " at index "
               << *status.broken_at << '\n';
        io.out << "broken " << *status.broken_at << '\n';
        return kLedgerBroken;
      }
      io.out << "ok " << entries.size() << '\n';
      io.out << Ledger(entries).head_hash() << '\n';
      return kOk;
    });
  }

  int main(int argc, char **argv, Streams io) {
    CLI::App app{"govlab: DAO governance mechanism simulator"};
    app.require_subcommand(1);

    std::string validate_path;
    auto *validate = app.add_subcommand("validate", "Check a scenario file");
    validate->add_option("--scenario", validate_path, "Scenario JSON")->required();

    RunOptions run_opts;
    std::string run_scenario, run_out, run_ledger, run_csv;
    std::uint64_t run_seed = 0;
    auto *run = app.add_subcommand("run", "Run a scenario and write its report");
    run->add_option("--scenario", run_scenario, "Scenario JSON")->required();
    run->add_option("--out", run_out, "Report output path")->required();
    run->add_option("--ledger", run_ledger, "Ledger output path");
    run->add_option("--csv", run_csv, "Per-agent realized power CSV");
    auto *seed_opt = run->add_option("--seed", run_seed, "Override the scenario seed");

    CompareOptions cmp_opts;
    std::string cmp_scenario, cmp_out, cmp_mechs;
    std::uint64_t cmp_seed = 0;
    auto *compare = app.add_subcommand("compare", "Run one scenario under several mechanisms");
    compare->add_option("--scenario", cmp_scenario, "Scenario JSON")->required();
    compare->add_option("--mechanisms", cmp_mechs, "Comma-separated mechanism list")
        ->required();
    compare->add_option("--out", cmp_out, "Comparison output path")->required();
    auto *cmp_seed_opt = compare->add_option("--seed", cmp_seed, "Override the scenario seed");

    std::string verify_path;
    auto *verify = app.add_subcommand("verify", "Verify a ledger's hash chain");
    verify->add_option("--ledger", verify_path, "Ledger JSONL")->required();

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
      std::ostringstream out, err;
      int code = app.exit(e, out, err);
      io.out << out.str();
      io.err << err.str();
      return code == 0 ? kOk : kRuntimeError;
    }

    if (validate->parsed()) {
      return cmd_validate(validate_path, io);
    }
    if (run->parsed()) {
      run_opts.scenario = run_scenario;
      run_opts.out = run_out;
      if (!run_ledger.empty()) {
        run_opts.ledger = run_ledger;
      }
      if (!run_csv.empty()) {
        run_opts.csv = run_csv;
      }
      if (seed_opt->count() > 0) {
        run_opts.seed = run_seed;
      }
      return cmd_run(run_opts, io);
    }
    if (compare->parsed()) {
      cmp_opts.scenario = cmp_scenario;
      cmp_opts.out = cmp_out;
      std::stringstream ss(cmp_mechs);
      for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) {
          cmp_opts.mechanisms.push_back(item);
        }
      }
      if (cmp_seed_opt->count() > 0) {
        cmp_opts.seed = cmp_seed;
      }
      return cmd_compare(cmp_opts, io);
    }
    return cmd_verify(verify_path, io);
  }

}  // namespace govlab::cli
