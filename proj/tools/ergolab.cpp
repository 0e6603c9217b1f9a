// ergolab command-line runner.
//
// Exit codes: 0 success, 2 config error, 3 budget exceeded, 4 degenerate
// statistics.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ergolab/ergolab.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int status_code(ergolab::expcli::RunStatus s) {
  switch (s) {
    case ergolab::expcli::RunStatus::ok: return 0;
    case ergolab::expcli::RunStatus::budget_exceeded: return 3;
    case ergolab::expcli::RunStatus::degenerate: return 4;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ergolab: Monte Carlo laboratory for statistics of chaotic maps"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string format = "csv";
  unsigned threads = 1;

  auto* run_cmd = app.add_subcommand("run", "run an experiment from a config file");
  run_cmd->add_option("--config", config_path, "config file path")->required();
  run_cmd->add_option("--out", out_dir, "output directory (default: current)");
  run_cmd->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  run_cmd->add_option("--threads", threads, "worker threads (result is thread-count invariant)");

  auto* list_cmd = app.add_subcommand("list", "list experiments and systems");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "validate a config file");
  validate_cmd->add_option("--config", validate_path, "config file path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_cmd->parsed()) {
      std::cout << "experiments:\n";
      for (const auto& [name, e] : ergolab::expcli::experiment_names()) {
        std::cout << "  " << name << "\n";
      }
      std::cout << "systems:\n";
      for (const char* s : {"doubling", "cat", "manneville_pomeau (alpha)", "quadratic (a)",
                            "lozi (a,b)", "henon (a,b)", "iid_uniform", "iid_rademacher"}) {
        std::cout << "  " << s << "\n";
      }
      return 0;
    }

    if (validate_cmd->parsed()) {
      try {
        ergolab::expcli::parse_config(read_file(validate_path));
        std::cout << "ok\n";
        return 0;
      } catch (const ergolab::expcli::ConfigError& e) {
        for (const auto& v : e.violations) std::cerr << "config error: " << v << "\n";
        return 2;
      }
    }

    // run
    ergolab::expcli::ExperimentConfig cfg;
    try {
      cfg = ergolab::expcli::parse_config(read_file(config_path));
    } catch (const ergolab::expcli::ConfigError& e) {
      for (const auto& v : e.violations) std::cerr << "config error: " << v << "\n";
      return 2;
    }
    ergolab::expcli::RunOptions options;
    options.threads = threads;
    const auto start = std::chrono::steady_clock::now();
    ergolab::expcli::ExperimentReport report;
    try {
      report = ergolab::expcli::run(cfg, options);
    } catch (const ergolab::expcli::ConfigError& e) {
      for (const auto& v : e.violations) std::cerr << "config error: " << v << "\n";
      return 2;
    }
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
    const auto fmt = format == "json" ? ergolab::expcli::EmitFormat::json
                                      : ergolab::expcli::EmitFormat::csv;
    const auto written = ergolab::expcli::emit(report, fmt, out_dir);
    // Runtime goes to the console only: emitted files are byte-identical
    // across reruns of the same config.
    std::cerr << "experiment " << report.experiment << " finished in " << elapsed.count()
              << " s\n";
    for (const auto& p : written) std::cerr << "wrote " << p.string() << "\n";
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    return status_code(report.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
