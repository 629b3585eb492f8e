// qanon: run, analyze and sweep anonymous-communication scenarios.
//
// Exit codes: 0 success, 1 parse/validation error, 2 resource/budget error.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qanon/qanon.hpp"

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> retry_budget;
  std::string out;
  std::string axis;
  bool verbose = false;
};

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("config", opt.config, "Scenario file (JSON)")->required();
  cmd->add_option("--seed", opt.seed, "Override the scenario seed");
  cmd->add_option("--trials", opt.trials, "Override the number of trials");
  cmd->add_option("--retry-budget", opt.retry_budget, "Anonymous entanglement attempts per run");
  cmd->add_option("--out", opt.out, "Write the report here instead of stdout");
  cmd->add_flag("--verbose", opt.verbose, "Include audit fields (tamper flags, source masks)");
}

qanon::ScenarioConfig load(const Options& opt, qanon::Mode mode) {
  qanon::ScenarioConfig c = qanon::parse_scenario(opt.config);
  c.mode = mode;
  if (opt.seed) c.seed = *opt.seed;
  if (opt.trials) c.trials = *opt.trials;
  if (opt.retry_budget) c.retry_budget = *opt.retry_budget;
  qanon::validate_config(c);
  return c;
}

void emit(const qanon::Json& report, const std::string& out) {
  const std::string text = report.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + out + "'");
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and verification harness for W-state anonymous quantum communication"};
  app.require_subcommand(1);
  Options opt;

  auto* run = app.add_subcommand("run", "Execute the full protocol for every trial");
  add_common(run, opt);
  auto* analyze = app.add_subcommand("analyze", "Exact anonymity and privacy analysis (n <= 8)");
  add_common(analyze, opt);
  auto* sweep = app.add_subcommand("sweep", "Repeat a scenario over a grid");
  add_common(sweep, opt);
  sweep->add_option("--axis", opt.axis, "n, corrupted-set or message")
      ->required()
      ->check(CLI::IsMember({"n", "corrupted-set", "message"}));

  CLI11_PARSE(app, argc, argv);

  const auto start = std::chrono::steady_clock::now();
  try {
    qanon::Json report;
    if (run->parsed()) {
      report = qanon::run_scenario(load(opt, qanon::Mode::Run), opt.verbose);
    } else if (analyze->parsed()) {
      report = qanon::analyze_scenario(load(opt, qanon::Mode::Analyze));
    } else {
      report = qanon::sweep(load(opt, qanon::Mode::Sweep), qanon::sweep_axis_from_string(opt.axis), opt.verbose);
    }
    emit(report, opt.out);
  } catch (const qanon::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const qanon::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const qanon::ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  std::cerr << "wall-clock " << elapsed.count() << " s\n";
  return 0;
}
