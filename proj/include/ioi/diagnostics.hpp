#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ioi/common.hpp"
#include "ioi/distributions.hpp"
#include "ioi/gibbs.hpp"

namespace ioi::diagnostics {

struct KsResult {
  double d;
  double p_value;  // asymptotic
};

/// Classical two-sample Kolmogorov-Smirnov statistic with asymptotic p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// One-sample Kolmogorov-Smirnov statistic against a reference cdf.
KsResult ks_one_sample(std::vector<double> a, const Distribution& reference);

/// Two-sample test for a correlation difference on the atanh scale:
/// z = (atanh(r1) - atanh(r2)) / sqrt(1/(n1-3) + 1/(n2-3)).
double fisher_z_statistic(double r1, long n1, double r2, long n2);

/// Potential scale reduction factor sqrt((W(n-1)/n + B/n)/W) over the
/// retained rows of each chain (each chain's own burn-in applies). Needs at
/// least two chains of equal retained length >= 100.
double gelman_rubin(const std::vector<gibbs::Chain>& chains, std::string_view parameter);

/// Variation of the limiting law across scanning orders, coarsest first.
/// Thresholds are engine policy, not a claim from theory: undetectable means
/// all KS p > 0.01 and all |z| < 2.58; negligible all D < 0.01; small all
/// D < 0.05; substantial otherwise.
enum class Verdict { Undetectable, Negligible, Small, Substantial };

std::string_view to_string(Verdict v);

struct DiagnosticsReport {
  std::vector<std::string> parameters;
  std::vector<double> rhat;  // per parameter, across the order runs

  struct PairComparison {
    int run_a = 0, run_b = 0;
    std::vector<double> ks_d;    // per parameter
    std::vector<double> ks_p;    // per parameter
    std::vector<double> corr_z;  // per parameter pair, i < j flattened
  };
  std::vector<PairComparison> comparisons;

  // Empirical proxies for the recurrence/irreducibility checklist; the
  // conditions themselves are not numerically verifiable.
  bool absorbing_state_suspected = false;
  double min_acceptance = kNaN;  // NaN when no Metropolis coordinate exists

  Verdict verdict = Verdict::Substantial;

  std::string render() const;
};

/// Runs one chain per scanning order (seeds base_config.seed + run index,
/// concurrently) and compares the retained samples: per-parameter two-sample
/// KS plus pairwise-correlation z tests, aggregated into the verdict.
DiagnosticsReport scan_order_sensitivity(const std::vector<gibbs::ConditionalSpec>& conditionals,
                                         const std::vector<gibbs::ScanOrder>& orders,
                                         const gibbs::GibbsConfig& base_config);

}  // namespace ioi::diagnostics
