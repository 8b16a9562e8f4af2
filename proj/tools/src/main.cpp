#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pnest_cli/commands.hpp"

namespace {

struct Options {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  int workers = 0;
  std::string estimators;
  std::uint64_t trial = 0;
};

void add_common(CLI::App* sub, Options& opts) {
  sub->add_option("--config", opts.config_path, "Experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--out", opts.out_path, "Output CSV path (default: config 'out' or stdout)");
  sub->add_option("--seed", opts.seed, "Master seed, overrides the config");
  sub->add_option("--workers", opts.workers, "Worker threads, overrides the config");
  sub->add_option("--estimators", opts.estimators,
                  "Comma-separated subset of the configured estimators");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace pnest::cli;

  CLI::App app{"Joint phase-noise and channel estimation for OFDM"};
  app.require_subcommand(1);
  Options opts;
  CLI::App* sweep = app.add_subcommand("sweep", "Monte Carlo sweep, aggregate CSV");
  CLI::App* trace = app.add_subcommand("trace", "Per-iteration objective trace for one block");
  CLI::App* single = app.add_subcommand("single", "Per-subcarrier phase estimates for one block");
  for (CLI::App* sub : {sweep, trace, single}) add_common(sub, opts);
  for (CLI::App* sub : {trace, single}) {
    sub->add_option("--trial", opts.trial, "Trial index of the block (default 0)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  RunConfig config;
  try {
    std::ifstream file(opts.config_path);
    std::stringstream text;
    text << file.rdbuf();
    ConfigOverrides overrides;
    CLI::App* active = app.get_subcommands().front();
    if (active->count("--seed") > 0) overrides.seed = opts.seed;
    if (active->count("--workers") > 0) overrides.workers = opts.workers;
    if (active->count("--out") > 0) overrides.out_path = opts.out_path;
    if (active->count("--estimators") > 0) overrides.estimators = split_list(opts.estimators);
    config = parse_config(text.str(), overrides);
  } catch (const ConfigError& e) {
    for (const std::string& message : e.errors()) {
      std::cerr << "config error: " << message << '\n';
    }
    return kExitConfigError;
  }

  std::ofstream file;
  if (!config.out_path.empty()) {
    file.open(config.out_path);
    if (!file) {
      std::cerr << "cannot open output file '" << config.out_path << "'\n";
      return kExitConfigError;
    }
  }
  std::ostream& out = config.out_path.empty() ? std::cout : file;

  try {
    if (sweep->parsed()) return cmd_sweep(config, out, std::cerr);
    if (trace->parsed()) return cmd_trace(config, opts.trial, out, std::cerr);
    return cmd_single(config, opts.trial, out, std::cerr);
  } catch (const ConfigError& e) {
    for (const std::string& message : e.errors()) {
      std::cerr << "config error: " << message << '\n';
    }
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitTrialError;
  }
}
