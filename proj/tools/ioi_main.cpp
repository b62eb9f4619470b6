#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "ioi/cli.hpp"
#include "ioi/scenarios.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ioi - joint post-data densities from full conditional builders"};
  app.require_subcommand(1);

  auto* list_cmd = app.add_subcommand("list", "List the built-in scenarios");

  ioi::cli::RunConfig cfg;
  if (const char* env = std::getenv("IOI_OUTPUT_DIR")) cfg.output_dir = env;
  std::vector<std::string> param_args;

  auto* run_cmd = app.add_subcommand("run", "Run a scenario or a config file");
  run_cmd->add_option("scenario", cfg.scenario, "Scenario name or config-file path")
      ->required();
  run_cmd->add_option("--seed", cfg.seed, "Random seed");
  run_cmd->add_option("--transitions", cfg.transitions, "Recorded transitions");
  run_cmd->add_option("--burn-in", cfg.burn_in, "Burn-in transitions");
  run_cmd->add_option("--scan", cfg.scan, "random or fixed:<name,name,...>");
  run_cmd->add_option("--out", cfg.output_dir, "Output directory");
  run_cmd->add_option("--thin", cfg.thin, "Output thinning factor");
  run_cmd->add_option("--bins", cfg.bins, "Histogram bins");
  run_cmd->add_option("--chains", cfg.chains, "Independent chains (seeds seed+0..M-1)");
  run_cmd->add_flag("--scan-check", cfg.scan_check,
                    "Append a two-order sensitivity pass to diagnostics.txt");
  run_cmd->add_option("--param", param_args, "Scenario override key=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (list_cmd->parsed()) {
    for (const auto& name : ioi::scenarios::scenario_names()) std::cout << name << "\n";
    return 0;
  }

  for (const auto& kv : param_args) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: --param expects key=value, got '" << kv << "'\n";
      return 2;
    }
    try {
      cfg.overrides[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      std::cerr << "error: --param value is not a number in '" << kv << "'\n";
      return 2;
    }
  }

  return ioi::cli::run(cfg);
}
