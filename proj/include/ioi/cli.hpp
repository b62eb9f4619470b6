#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ioi/common.hpp"
#include "ioi/gibbs.hpp"
#include "ioi/scenarios.hpp"

namespace ioi::cli {

struct RunConfig {
  std::string scenario;  // registry name, or a path to a config file
  std::map<std::string, double> overrides;
  std::uint64_t seed = 1;
  long transitions = 100000;
  long burn_in = 1000;
  std::string scan = "random";  // "random" or "fixed:<name,name,...>"
  std::string output_dir = ".";
  long thin = 1;   // output-side only
  int bins = 60;   // histogram resolution
  int chains = 1;  // independent chains, seeds seed+0..chains-1
  bool scan_check = false;  // append a two-order sensitivity pass
};

/// Flat "[section] key = value" text, comments with '#'.
std::map<std::string, std::map<std::string, std::string>> parse_config_text(
    const std::string& text);

/// Run settings and scenario overrides from a config file.
RunConfig load_run_config(const std::string& path);

/// Round-trip serialization of a scenario's defining parameters.
std::string scenario_to_config(const scenarios::ScenarioSpec& spec);
scenarios::ScenarioSpec scenario_from_config(const std::string& text);

/// Density-normalized histogram rows "left,right,density" with
/// sum(density * width) = 1 over the emitted bins.
std::vector<std::string> emit_histogram(const std::vector<double>& samples, int bins,
                                        Interval range);

/// Parse "random" / "fixed:a,b,c" against the scenario's parameter names.
gibbs::ScanOrder parse_scan(const std::string& text, const std::vector<std::string>& names);

/// Executes the run and writes chain.csv, summary.txt, reference_*.csv,
/// hist_*.csv and diagnostics.txt into the output directory. Returns the
/// process exit status: 0 success, 1 runtime failure, 2 usage error; on
/// failure a single machine-readable line goes to the error stream.
int run(const RunConfig& config);

}  // namespace ioi::cli
