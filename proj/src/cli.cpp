#include "ioi/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "ioi/diagnostics.hpp"

namespace ioi::cli {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double quantile_of_sorted(const std::vector<double>& sorted, double p) {
  const double idx = p * (sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(idx);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double t = idx - lo;
  return sorted[lo] + t * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::map<std::string, std::map<std::string, std::string>> parse_config_text(
    const std::string& text) {
  std::map<std::string, std::map<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      require(line.back() == ']', "config: unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      require(!section.empty(), "config: empty section name");
      out[section];
      continue;
    }
    const auto eq = line.find('=');
    require(eq != std::string::npos, "config: expected key = value at line " +
                                         std::to_string(lineno));
    require(!section.empty(), "config: key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    require(!key.empty(), "config: empty key");
    out[section][key] = value;
  }
  return out;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "config: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto sections = parse_config_text(buffer.str());

  RunConfig cfg;
  if (const auto it = sections.find("run"); it != sections.end()) {
    const auto& kv = it->second;
    auto get = [&kv](const char* key) -> const std::string* {
      const auto f = kv.find(key);
      return f == kv.end() ? nullptr : &f->second;
    };
    if (const auto* v = get("scenario")) cfg.scenario = *v;
    if (const auto* v = get("seed")) cfg.seed = std::stoull(*v);
    if (const auto* v = get("transitions")) cfg.transitions = std::stol(*v);
    if (const auto* v = get("burn_in")) cfg.burn_in = std::stol(*v);
    if (const auto* v = get("scan")) cfg.scan = *v;
    if (const auto* v = get("output")) cfg.output_dir = *v;
    if (const auto* v = get("thin")) cfg.thin = std::stol(*v);
    if (const auto* v = get("bins")) cfg.bins = std::stoi(*v);
    if (const auto* v = get("chains")) cfg.chains = std::stoi(*v);
    if (const auto* v = get("scan_check")) cfg.scan_check = *v == "1" || *v == "true";
  }
  if (const auto it = sections.find("scenario"); it != sections.end()) {
    for (const auto& [key, value] : it->second) {
      if (key == "name") {
        cfg.scenario = value;
      } else {
        cfg.overrides[key] = std::stod(value);
      }
    }
  }
  require(!cfg.scenario.empty(), "config: no scenario given");
  return cfg;
}

std::string scenario_to_config(const scenarios::ScenarioSpec& spec) {
  std::ostringstream os;
  os << "[scenario]\n";
  os << "name = " << spec.name << "\n";
  for (const auto& [key, value] : spec.params) {
    os << key << " = " << format_full(value) << "\n";
  }
  return os.str();
}

scenarios::ScenarioSpec scenario_from_config(const std::string& text) {
  const auto sections = parse_config_text(text);
  const auto it = sections.find("scenario");
  require(it != sections.end(), "config: missing [scenario] section");
  std::string name;
  std::map<std::string, double> params;
  for (const auto& [key, value] : it->second) {
    if (key == "name") {
      name = value;
    } else {
      params[key] = std::stod(value);
    }
  }
  require(!name.empty(), "config: scenario name missing");
  return scenarios::build_scenario(name, params);
}

std::vector<std::string> emit_histogram(const std::vector<double>& samples, int bins,
                                        Interval range) {
  require(bins >= 2, "emit_histogram: need at least two bins");
  require(!samples.empty(), "emit_histogram: empty sample");
  require(range.finite() && range.hi > range.lo, "emit_histogram: bad range");
  std::vector<long> counts(bins, 0);
  long inside = 0;
  const double width = range.width() / bins;
  for (double x : samples) {
    if (x < range.lo || x > range.hi) continue;
    int b = static_cast<int>((x - range.lo) / width);
    b = std::min(b, bins - 1);
    ++counts[b];
    ++inside;
  }
  require(inside > 0, "emit_histogram: no samples inside the range");
  std::vector<std::string> rows;
  rows.reserve(bins);
  for (int b = 0; b < bins; ++b) {
    const double density = counts[b] / (inside * width);
    rows.push_back(format_full(range.lo + b * width) + "," +
                   format_full(range.lo + (b + 1) * width) + "," + format_full(density));
  }
  return rows;
}

gibbs::ScanOrder parse_scan(const std::string& text, const std::vector<std::string>& names) {
  if (text == "random") return gibbs::ScanOrder::uniform_random();
  const std::string prefix = "fixed:";
  require(text.rfind(prefix, 0) == 0, "scan: expected 'random' or 'fixed:<names>'");
  std::vector<int> order;
  std::stringstream ss(text.substr(prefix.size()));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    const auto it = std::find(names.begin(), names.end(), item);
    require(it != names.end(), "scan: unknown parameter '" + item + "'");
    order.push_back(static_cast<int>(it - names.begin()));
  }
  return gibbs::ScanOrder::fixed(order);
}

namespace {

void write_chain_csv(const std::filesystem::path& path, const gibbs::Chain& chain, long thin) {
  std::ofstream out(path);
  out << "transition";
  for (const auto& name : chain.names()) out << "," << name;
  out << "\n";
  for (long r = 0; r < chain.rows(); r += thin) {
    out << r;
    for (int j = 0; j < chain.k(); ++j) out << "," << format_full(chain.at(r, j));
    out << "\n";
  }
}

void write_summary(const std::filesystem::path& path, const scenarios::ScenarioSpec& spec,
                   const RunConfig& cfg, const gibbs::Chain& chain) {
  std::ofstream out(path);
  out << "scenario: " << spec.name << "\n";
  out << "seed: " << cfg.seed << "\n";
  out << "transitions: " << cfg.transitions << "\n";
  out << "burn_in: " << cfg.burn_in << "\n";
  out << "scan: " << cfg.scan << "\n";
  for (const auto& [key, value] : spec.params) {
    out << "param " << key << ": " << format_full(value) << "\n";
  }
  out << "\n";
  for (int j = 0; j < chain.k(); ++j) {
    auto xs = chain.column(j, cfg.burn_in);
    const auto est = gibbs::monte_carlo_expectation(
        chain, [j](const std::vector<double>& v) { return v[j]; }, cfg.burn_in);
    std::sort(xs.begin(), xs.end());
    out << chain.names()[j] << ": mean=" << format_full(est.value)
        << " se=" << format_full(est.std_error)
        << " q2.5=" << format_full(quantile_of_sorted(xs, 0.025))
        << " q50=" << format_full(quantile_of_sorted(xs, 0.5))
        << " q97.5=" << format_full(quantile_of_sorted(xs, 0.975));
    const double rate = chain.acceptance_rate(j);
    if (!std::isnan(rate)) out << " accept=" << format_full(rate);
    out << "\n";
  }
}

void write_reference_curves(const std::filesystem::path& dir,
                            const scenarios::ScenarioSpec& spec) {
  for (const auto& curve : spec.references) {
    std::ofstream out(dir / ("reference_" + curve.name + ".csv"));
    out << "x,density\n";
    const int points = 512;
    for (int i = 0; i <= points; ++i) {
      const double x = curve.range.lo + curve.range.width() * i / points;
      out << format_full(x) << "," << format_full(curve.pdf(x)) << "\n";
    }
  }
}

void write_histograms(const std::filesystem::path& dir, const gibbs::Chain& chain,
                      const RunConfig& cfg) {
  for (int j = 0; j < chain.k(); ++j) {
    const auto xs = chain.column(j, cfg.burn_in);
    const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
    Interval range{*lo_it, *hi_it};
    if (range.width() <= 0.0) range.hi = range.lo + 1.0;
    const auto rows = emit_histogram(xs, cfg.bins, range);
    std::ofstream out(dir / ("hist_" + chain.names()[j] + ".csv"));
    out << "bin_left,bin_right,density\n";
    for (const auto& row : rows) out << row << "\n";
  }
}

void write_diagnostics(const std::filesystem::path& dir, const scenarios::ScenarioSpec& spec,
                       const RunConfig& cfg, const std::vector<gibbs::Chain>& chains) {
  std::ofstream out(dir / "diagnostics.txt");
  out << "chains: " << chains.size() << "\n";
  for (int j = 0; j < chains.front().k(); ++j) {
    const double rate = chains.front().acceptance_rate(j);
    out << "update " << chains.front().names()[j] << ": count="
        << chains.front().update_count(j);
    if (!std::isnan(rate)) out << " accept=" << format_full(rate);
    out << "\n";
  }
  if (chains.size() >= 2) {
    for (int j = 0; j < chains.front().k(); ++j) {
      out << "rhat " << chains.front().names()[j] << " = "
          << format_full(diagnostics::gelman_rubin(chains, chains.front().names()[j])) << "\n";
    }
  }
  if (cfg.scan_check && spec.conditionals.size() >= 2) {
    const int k = static_cast<int>(spec.conditionals.size());
    std::vector<int> forward(k), reverse(k);
    for (int j = 0; j < k; ++j) {
      forward[j] = j;
      reverse[j] = k - 1 - j;
    }
    gibbs::GibbsConfig base;
    base.n_transitions = cfg.transitions;
    base.burn_in = cfg.burn_in;
    base.seed = cfg.seed;
    base.initial = spec.initial;
    const auto report = diagnostics::scan_order_sensitivity(
        spec.conditionals,
        {gibbs::ScanOrder::fixed(forward), gibbs::ScanOrder::fixed(reverse)}, base);
    out << "\n" << report.render();
  }
}

}  // namespace

int run(const RunConfig& config) {
  // A path in the scenario slot means the file defines the whole run.
  RunConfig effective = config;
  scenarios::ScenarioSpec spec;
  try {
    if (std::filesystem::exists(config.scenario) &&
        std::filesystem::is_regular_file(config.scenario)) {
      effective = load_run_config(config.scenario);
    }
    spec = scenarios::build_scenario(effective.scenario, effective.overrides);
  } catch (const std::out_of_range&) {
    std::cerr << "error: unknown scenario: " << effective.scenario << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    require(effective.thin >= 1, "run: thin must be >= 1");
    require(effective.chains >= 1, "run: chains must be >= 1");
    std::filesystem::create_directories(effective.output_dir);
    const std::filesystem::path dir(effective.output_dir);

    gibbs::GibbsConfig base;
    base.n_transitions = effective.transitions;
    base.burn_in = effective.burn_in;
    base.seed = effective.seed;
    base.scan = parse_scan(effective.scan, [&] {
      std::vector<std::string> names;
      for (const auto& c : spec.conditionals) names.push_back(c.name);
      return names;
    }());
    base.initial = spec.initial;

    std::vector<gibbs::Chain> chains(effective.chains);
    std::vector<std::exception_ptr> errors(effective.chains);
    {
      std::vector<std::thread> pool;
      for (int i = 0; i < effective.chains; ++i) {
        pool.emplace_back([&, i] {
          try {
            gibbs::GibbsConfig cfg = base;
            cfg.seed = base.seed + static_cast<std::uint64_t>(i);
            chains[i] = gibbs::run_chain(spec.conditionals, cfg);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        });
      }
      for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }

    write_chain_csv(dir / "chain.csv", chains.front(), effective.thin);
    write_summary(dir / "summary.txt", spec, effective, chains.front());
    write_reference_curves(dir, spec);
    write_histograms(dir, chains.front(), effective);
    write_diagnostics(dir, spec, effective, chains);
    std::ofstream(dir / "scenario.cfg") << scenario_to_config(spec);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ioi::cli
