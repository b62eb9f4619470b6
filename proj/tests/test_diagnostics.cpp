#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ioi/diagnostics.hpp"
#include "ioi/distributions.hpp"
#include "ioi/gibbs.hpp"

using namespace ioi;
using namespace ioi::diagnostics;
using ioi::gibbs::Chain;
using ioi::gibbs::ConditionalDensity;
using ioi::gibbs::ConditionalSpec;
using ioi::gibbs::GibbsConfig;
using ioi::gibbs::ScanOrder;

namespace {

ConditionalSpec direct_from(std::string name, Distribution d) {
  ConditionalSpec spec;
  spec.name = std::move(name);
  spec.builder = [d](const std::vector<double>&) {
    ConditionalDensity cd;
    cd.logpdf = [d](double x) { return logpdf(d, x); };
    cd.direct_sampler = [d](RandomStream& rng) { return sample(d, rng); };
    return cd;
  };
  return spec;
}

Chain chain_of(Distribution d, std::uint64_t seed, long rows, long burn_in = 0) {
  GibbsConfig cfg;
  cfg.n_transitions = rows;
  cfg.burn_in = burn_in;
  cfg.seed = seed;
  cfg.initial = {mean(d)};
  return run_chain({direct_from("x", d)}, cfg);
}

std::vector<ConditionalSpec> binormal_pair(double rho) {
  auto make = [rho](std::string name, int other) {
    ConditionalSpec spec;
    spec.name = std::move(name);
    spec.builder = [rho, other](const std::vector<double>& v) {
      const Distribution d = Normal(rho * v[other], 1.0 - rho * rho);
      ConditionalDensity cd;
      cd.logpdf = [d](double x) { return logpdf(d, x); };
      cd.direct_sampler = [d](RandomStream& rng) { return sample(d, rng); };
      return cd;
    };
    return spec;
  };
  return {make("a", 1), make("b", 0)};
}

// Sign-conflicted pair admitting no joint law: the sweep map doubles the
// variance every transition, so the runs drift apart.
std::vector<ConditionalSpec> incompatible_pair() {
  auto make = [](std::string name, int other, double sign) {
    ConditionalSpec spec;
    spec.name = std::move(name);
    spec.builder = [other, sign](const std::vector<double>& v) {
      const Distribution d = Normal(sign * v[other], 1.0);
      ConditionalDensity cd;
      cd.logpdf = [d](double x) { return logpdf(d, x); };
      cd.direct_sampler = [d](RandomStream& rng) { return sample(d, rng); };
      return cd;
    };
    return spec;
  };
  return {make("a", 1, 1.0), make("b", 0, -1.0)};
}

}  // namespace

TEST_CASE("two-sample ks statistic") {
  RandomStream rng(1);
  std::vector<double> a(10000), b(10000);
  for (auto& x : a) x = rng.uniform01();
  for (auto& x : b) x = 0.5 + rng.uniform01();
  const auto same = ks_two_sample(a, a);
  CHECK(same.d == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(same.p_value == doctest::Approx(1.0).epsilon(1e-12));
  const auto shifted = ks_two_sample(a, b);
  CHECK(shifted.d == doctest::Approx(0.5).epsilon(0.03));
  CHECK(shifted.p_value < 1e-10);

  std::vector<double> c(10000), d(10000);
  RandomStream r2(2), r3(3);
  for (auto& x : c) x = r2.normal01();
  for (auto& x : d) x = r3.normal01();
  CHECK(ks_two_sample(c, d).p_value > 0.01);
}

TEST_CASE("one-sample ks statistic") {
  const Distribution ref = Normal(0.0, 1.0);
  std::vector<double> xs(1000000);
  RandomStream rng(7);
  for (auto& x : xs) x = sample(ref, rng);
  const auto r = ks_one_sample(xs, ref);
  CHECK(r.d < 0.01);
  CHECK(r.p_value > 0.0);
  // Constant sample against a continuous reference.
  const auto degenerate = ks_one_sample(std::vector<double>(100, 0.0), ref);
  CHECK(degenerate.d >= 0.5);
}

TEST_CASE("ks p-value decreases in the statistic") {
  // Growing shifts raise D and shrink p.
  RandomStream rng(5);
  std::vector<double> base(20000);
  for (auto& x : base) x = rng.normal01();
  double prev_p = 2.0, prev_d = -1.0;
  for (double shift : {0.0, 0.01, 0.02, 0.05, 0.1, 0.2}) {
    std::vector<double> moved = base;
    for (auto& x : moved) x += shift;
    const auto r = ks_two_sample(base, moved);
    CHECK(r.d >= prev_d);
    CHECK(r.p_value <= prev_p + 1e-12);
    prev_p = r.p_value;
    prev_d = r.d;
  }
}

TEST_CASE("potential scale reduction factor") {
  const Chain c = chain_of(Normal(0, 1), 11, 100000);
  const std::vector<Chain> identical{c, c};
  const double r = gelman_rubin(identical, "x");
  // Exact reduction at zero between-chain variance.
  const double n = 100000.0;
  CHECK(r == doctest::Approx(std::sqrt((n - 1.0) / n)).epsilon(1e-12));
  CHECK(std::fabs(r - 1.0) < 1e-5);

  const std::vector<Chain> disjoint{chain_of(Normal(0, 1), 1, 10000),
                                    chain_of(Normal(5, 1), 2, 10000)};
  CHECK(gelman_rubin(disjoint, "x") > 1.1);

  const std::vector<Chain> close{chain_of(Normal(0, 1), 3, 50000),
                                 chain_of(Normal(0, 1), 4, 50000),
                                 chain_of(Normal(0, 1), 5, 50000)};
  CHECK(gelman_rubin(close, "x") < 1.01);

  CHECK_THROWS(gelman_rubin({c}, "x"));
}

TEST_CASE("gelman-rubin rejects degenerate chains") {
  ConditionalSpec constant;
  constant.name = "x";
  constant.builder = [](const std::vector<double>&) {
    ConditionalDensity cd;
    cd.logpdf = [](double) { return 0.0; };
    cd.direct_sampler = [](RandomStream&) { return 1.0; };
    return cd;
  };
  GibbsConfig cfg;
  cfg.n_transitions = 200;
  cfg.burn_in = 0;
  cfg.seed = 1;
  cfg.initial = {1.0};
  const Chain c = run_chain({constant}, cfg);
  CHECK_THROWS_AS(gelman_rubin({c, c}, "x"), std::domain_error);
}

TEST_CASE("fisher z statistic") {
  CHECK(fisher_z_statistic(0.5, 1000, 0.5, 1000) == doctest::Approx(0.0));
  CHECK(fisher_z_statistic(0.6, 1000, 0.5, 1000) > 2.0);
  CHECK(fisher_z_statistic(0.5, 1000, 0.6, 1000) < -2.0);
}

TEST_CASE("scan-order sensitivity: compatible system is undetectable") {
  GibbsConfig cfg;
  cfg.n_transitions = 200000;
  cfg.burn_in = 1000;
  cfg.seed = 10;
  cfg.initial = {0.0, 0.0};
  const std::vector<ScanOrder> orders{ScanOrder::fixed({0, 1}), ScanOrder::fixed({1, 0})};
  const auto report = scan_order_sensitivity(binormal_pair(0.5), orders, cfg);
  CHECK(report.verdict == Verdict::Undetectable);
  CHECK_FALSE(report.absorbing_state_suspected);
  for (double r : report.rhat) CHECK(r < 1.01);

  // Same verdict when the order list is permuted.
  const std::vector<ScanOrder> reversed{ScanOrder::fixed({1, 0}), ScanOrder::fixed({0, 1})};
  const auto report2 = scan_order_sensitivity(binormal_pair(0.5), reversed, cfg);
  CHECK(report2.verdict == report.verdict);

  // A single order duplicated across seeds shares the limiting law.
  const std::vector<ScanOrder> dup{ScanOrder::fixed({0, 1}), ScanOrder::fixed({0, 1})};
  const auto report3 = scan_order_sensitivity(binormal_pair(0.5), dup, cfg);
  CHECK(report3.verdict == Verdict::Undetectable);
}

TEST_CASE("scan-order sensitivity: sign-conflicted system is flagged") {
  GibbsConfig cfg;
  cfg.n_transitions = 100000;
  cfg.burn_in = 1000;
  cfg.seed = 21;
  cfg.initial = {0.1, -0.1};
  const std::vector<ScanOrder> orders{ScanOrder::fixed({0, 1}), ScanOrder::fixed({1, 0})};
  const auto report = scan_order_sensitivity(incompatible_pair(), orders, cfg);
  CHECK(report.verdict != Verdict::Undetectable);

  const std::string text = report.render();
  CHECK(text.find("verdict") != std::string::npos);
  CHECK(text.find("rhat") != std::string::npos);
  CHECK(text.find("checklist") != std::string::npos);
}
