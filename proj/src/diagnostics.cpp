#include "ioi/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

namespace ioi::diagnostics {

namespace {

double ks_asymptotic_p(double d, double effective_n) {
  const double sq = std::sqrt(effective_n);
  const double lambda = (sq + 0.12 + 0.11 / sq) * d;
  if (lambda < 1e-8) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 128; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double sample_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), "ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  const double ne = na * nb / (na + nb);
  return {d, ks_asymptotic_p(d, ne)};
}

KsResult ks_one_sample(std::vector<double> a, const Distribution& reference) {
  require(!a.empty(), "ks_one_sample: empty sample");
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double c = cdf(reference, a[i]);
    d = std::max(d, std::fabs(c - (i + 1.0) / n));
    d = std::max(d, std::fabs(c - i / n));
  }
  return {d, ks_asymptotic_p(d, n)};
}

double fisher_z_statistic(double r1, long n1, double r2, long n2) {
  require(std::fabs(r1) < 1.0 && std::fabs(r2) < 1.0, "fisher_z: correlations must be in (-1,1)");
  require(n1 > 3 && n2 > 3, "fisher_z: need more than three observations");
  return (std::atanh(r1) - std::atanh(r2)) /
         std::sqrt(1.0 / (n1 - 3.0) + 1.0 / (n2 - 3.0));
}

double gelman_rubin(const std::vector<gibbs::Chain>& chains, std::string_view parameter) {
  require(chains.size() >= 2, "gelman_rubin: need at least two chains");
  const long retained = chains.front().rows() - chains.front().config().burn_in;
  require(retained >= 100, "gelman_rubin: retained length must be >= 100");
  for (const auto& c : chains) {
    require(c.rows() - c.config().burn_in == retained,
            "gelman_rubin: retained lengths must match");
  }
  const double m = static_cast<double>(chains.size());
  const double n = static_cast<double>(retained);
  std::vector<double> means, vars;
  for (const auto& c : chains) {
    const auto xs = c.column(parameter, c.config().burn_in);
    double mu = 0.0;
    for (double x : xs) mu += x;
    mu /= n;
    double v = 0.0;
    for (double x : xs) v += (x - mu) * (x - mu);
    v /= (n - 1.0);
    means.push_back(mu);
    vars.push_back(v);
  }
  double w = 0.0;
  for (double v : vars) w += v;
  w /= m;
  if (w <= 0.0) throw std::domain_error("gelman_rubin: zero within-chain variance");
  double grand = 0.0;
  for (double mu : means) grand += mu;
  grand /= m;
  double b = 0.0;  // n * variance of the chain means
  for (double mu : means) b += (mu - grand) * (mu - grand);
  b *= n / (m - 1.0);
  return std::sqrt((w * (n - 1.0) / n + b / n) / w);
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Undetectable: return "undetectable";
    case Verdict::Negligible: return "negligible";
    case Verdict::Small: return "small";
    case Verdict::Substantial: return "substantial";
  }
  return "substantial";
}

DiagnosticsReport scan_order_sensitivity(const std::vector<gibbs::ConditionalSpec>& conditionals,
                                         const std::vector<gibbs::ScanOrder>& orders,
                                         const gibbs::GibbsConfig& base_config) {
  require(orders.size() >= 2, "scan_order_sensitivity: need at least two orders");
  const int k = static_cast<int>(conditionals.size());
  const int n_runs = static_cast<int>(orders.size());

  std::vector<gibbs::Chain> runs(n_runs);
  std::vector<std::exception_ptr> errors(n_runs);
  {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_runs; ++i) {
      pool.emplace_back([&, i] {
        try {
          gibbs::GibbsConfig cfg = base_config;
          cfg.scan = orders[i];
          cfg.seed = base_config.seed + static_cast<std::uint64_t>(i);
          runs[i] = gibbs::run_chain(conditionals, cfg);
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

  DiagnosticsReport report;
  for (const auto& c : conditionals) report.parameters.push_back(c.name);

  for (int j = 0; j < k; ++j) {
    report.rhat.push_back(gelman_rubin(runs, conditionals[j].name));
  }

  const long burn = base_config.burn_in;
  std::vector<std::vector<std::vector<double>>> cols(n_runs);
  for (int i = 0; i < n_runs; ++i) {
    for (int j = 0; j < k; ++j) cols[i].push_back(runs[i].column(j, burn));
  }
  const long retained = base_config.n_transitions - burn;

  bool all_p_large = true, all_z_small = true;
  double max_d = 0.0;
  for (int a = 0; a < n_runs; ++a) {
    for (int b = a + 1; b < n_runs; ++b) {
      DiagnosticsReport::PairComparison cmp;
      cmp.run_a = a;
      cmp.run_b = b;
      for (int j = 0; j < k; ++j) {
        const KsResult ks = ks_two_sample(cols[a][j], cols[b][j]);
        cmp.ks_d.push_back(ks.d);
        cmp.ks_p.push_back(ks.p_value);
        max_d = std::max(max_d, ks.d);
        all_p_large = all_p_large && ks.p_value > 0.01;
      }
      for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
          const double ra = sample_correlation(cols[a][i], cols[a][j]);
          const double rb = sample_correlation(cols[b][i], cols[b][j]);
          const double z = fisher_z_statistic(ra, retained, rb, retained);
          cmp.corr_z.push_back(z);
          all_z_small = all_z_small && std::fabs(z) < 2.58;
        }
      }
      report.comparisons.push_back(std::move(cmp));
    }
  }

  if (all_p_large && all_z_small) {
    report.verdict = Verdict::Undetectable;
  } else if (max_d < 0.01) {
    report.verdict = Verdict::Negligible;
  } else if (max_d < 0.05) {
    report.verdict = Verdict::Small;
  } else {
    report.verdict = Verdict::Substantial;
  }

  // Checklist proxies: a coordinate frozen for half of the retained run (or
  // constant outright) suggests an absorbing state; the smallest Metropolis
  // acceptance rate should be bounded away from zero.
  for (int i = 0; i < n_runs; ++i) {
    for (int j = 0; j < k; ++j) {
      const auto& xs = cols[i][j];
      long longest = 1, cur = 1;
      bool distinct = false;
      for (std::size_t t = 1; t < xs.size(); ++t) {
        if (xs[t] == xs[t - 1]) {
          ++cur;
        } else {
          distinct = true;
          longest = std::max(longest, cur);
          cur = 1;
        }
      }
      longest = std::max(longest, cur);
      if (!distinct || longest > retained / 2) report.absorbing_state_suspected = true;
    }
    for (int j = 0; j < k; ++j) {
      const double rate = runs[i].acceptance_rate(j);
      if (!std::isnan(rate)) {
        report.min_acceptance =
            std::isnan(report.min_acceptance) ? rate : std::min(report.min_acceptance, rate);
      }
    }
  }
  return report;
}

std::string DiagnosticsReport::render() const {
  std::ostringstream os;
  os << "scan-order sensitivity report\n";
  os << "verdict: " << to_string(verdict) << "\n";
  os << "parameters:";
  for (const auto& p : parameters) os << " " << p;
  os << "\n";
  for (std::size_t j = 0; j < parameters.size(); ++j) {
    os << "rhat " << parameters[j] << " = " << rhat[j] << "\n";
  }
  for (const auto& c : comparisons) {
    os << "runs " << c.run_a << " vs " << c.run_b << ":\n";
    for (std::size_t j = 0; j < parameters.size(); ++j) {
      os << "  ks " << parameters[j] << ": D = " << c.ks_d[j] << ", p = " << c.ks_p[j] << "\n";
    }
    std::size_t idx = 0;
    for (std::size_t i = 0; i < parameters.size(); ++i) {
      for (std::size_t j = i + 1; j < parameters.size(); ++j, ++idx) {
        os << "  corr z (" << parameters[i] << "," << parameters[j]
           << ") = " << c.corr_z[idx] << "\n";
      }
    }
  }
  os << "checklist:\n";
  os << "  positive recurrence (empirical proxy): "
     << (absorbing_state_suspected ? "absorbing state suspected" : "no absorbing states observed")
     << "\n";
  os << "  irreducibility/aperiodicity (empirical proxy): ";
  if (std::isnan(min_acceptance)) {
    os << "no Metropolis coordinates\n";
  } else {
    os << "min Metropolis acceptance = " << min_acceptance << "\n";
  }
  return os.str();
}

}  // namespace ioi::diagnostics
