#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ioi/density.hpp"
#include "ioi/distributions.hpp"
#include "ioi/quadrature.hpp"
#include "ioi/rng.hpp"

using namespace ioi;

namespace {

const std::vector<Distribution> continuous_variants() {
  return {
      Normal(0.0, 1.0),
      Normal(2.7, 1.0),
      InvGamma(8.0, 100.0),
      InvGamma(4.5, 40.5),
      NonStdT(8.0, 2.7, 1.0),
      NonStdT(16.0, 2.7, std::sqrt(200.0 / 144.0)),
      ScaledBeta(4.0, 4.0, -0.2, 0.2),
      ScaledBeta(2.0, 11.5, 0.0, 1.0),
      TruncNormal(-36.0, 36.0),
      TruncNormal(-2.0, 1.0),
  };
}

// Integration range for pdf checks: quantile box widened a little.
Interval grid_range(const Distribution& d) {
  const Interval s = support(d);
  double lo = s.finite() ? s.lo : quantile(d, 1e-9);
  double hi = s.finite() ? s.hi : quantile(d, 1.0 - 1e-9);
  if (!s.finite()) {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    lo = std::max(lo, s.lo);
    hi = std::min(hi, s.hi);
  }
  return {lo, hi};
}

}  // namespace

TEST_CASE("logpdf spot values") {
  CHECK(logpdf(Normal(0, 1), 0.0) == doctest::Approx(-0.9189385332046727).epsilon(1e-12));
  CHECK(logpdf(InvGamma(8, 100), -1.0) == -kInf);
  // NonStdT(8, 2.7, 1) at the location equals the standard t8 density at 0,
  // via its closed form Gamma(4.5)/(sqrt(8*pi)*Gamma(4)).
  const double t8_at_0 =
      std::exp(std::lgamma(4.5) - std::lgamma(4.0)) / std::sqrt(8.0 * M_PI);
  CHECK(logpdf(NonStdT(8, 2.7, 1), 2.7) == doctest::Approx(std::log(t8_at_0)).epsilon(1e-12));
}

TEST_CASE("cdf spot values") {
  CHECK(cdf(Normal(0, 1), 0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(cdf(ScaledBeta(4, 4, -0.2, 0.2), 0.0) == doctest::Approx(0.5).epsilon(1e-12));
  // Binomial(8, 0.25) at 2 against direct pmf summation.
  double acc = 0.0;
  for (int j = 0; j <= 2; ++j) acc += std::exp(logpdf(Binomial(8, 0.25), j));
  CHECK(cdf(Binomial(8, 0.25), 2.0) == doctest::Approx(acc).epsilon(1e-13));
  CHECK(acc == doctest::Approx(0.6785430908203125).epsilon(1e-12));
}

TEST_CASE("quantile spot values") {
  CHECK(quantile(NonStdT(8, 2.7, 1), 0.5) == doctest::Approx(2.7).epsilon(1e-9));
  // Standard normal 97.5% point recovered by root-finding on the cdf.
  double lo = 0.0, hi = 8.0;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < 0.975 ? lo : hi) = mid;
  }
  const double z975 = 0.5 * (lo + hi);
  CHECK(quantile(Normal(2.7, 1.0), 0.975) == doctest::Approx(2.7 + z975).epsilon(1e-10));
  CHECK(z975 == doctest::Approx(1.959964).epsilon(1e-6));
  CHECK(std::fabs(quantile(TruncNormal(-36, 36), 0.5)) < 1e-9);
  CHECK_THROWS(quantile(Binomial(8, 0.25), 0.5));
  CHECK_THROWS(quantile(Normal(0, 1), 0.0));
  CHECK_THROWS(quantile(Normal(0, 1), 1.0));
}

TEST_CASE("pdf integrates to one on a 1e3-point grid") {
  for (const auto& d : continuous_variants()) {
    const Interval r = grid_range(d);
    const double mass =
        trapezoid([&](double x) { return pdf(d, x); }, r.lo, r.hi, 4000);
    CHECK(mass == doctest::Approx(1.0).epsilon(2e-6));
  }
}

TEST_CASE("cdf/quantile round trip") {
  for (const auto& d : continuous_variants()) {
    for (double p : {0.01, 0.1, 0.5, 0.9, 0.99}) {
      const double x = quantile(d, p);
      CHECK(cdf(d, x) == doctest::Approx(p).epsilon(1e-9));
    }
  }
}

TEST_CASE("quantile(cdf(x)) = x on the interior") {
  for (const auto& d : continuous_variants()) {
    const Interval r = grid_range(d);
    for (int i = 1; i < 8; ++i) {
      const double x = r.lo + i * (r.hi - r.lo) / 8.0;
      const double p = cdf(d, x);
      if (p <= 1e-14 || p >= 1.0 - 1e-14) continue;
      CHECK(quantile(d, p) == doctest::Approx(x).epsilon(1e-8));
    }
  }
}

TEST_CASE("scaled beta symmetry") {
  const ScaledBeta h(4, 4, -0.2, 0.2);
  for (double x : {0.05, 0.1, 0.15}) {
    CHECK(pdf(Distribution(h), x) == doctest::Approx(pdf(Distribution(h), -x)).epsilon(1e-12));
  }
  CHECK(cdf(Distribution(h), 0.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("sampling determinism") {
  RandomStream a(12345), b(12345);
  for (const auto& d : continuous_variants()) {
    for (int i = 0; i < 16; ++i) {
      CHECK(sample(d, a) == sample(d, b));  // bit-identical
    }
  }
}

TEST_CASE("sample moments: inverse gamma and binomial") {
  RandomStream rng(7);
  const int n = 1000000;
  double acc = 0.0;
  const Distribution ig = InvGamma(8, 100);
  for (int i = 0; i < n; ++i) acc += sample(ig, rng);
  const double m = acc / n;
  // var = scale^2/((shape-1)^2 (shape-2)) = 100^2/(49*6)
  const double se = std::sqrt(10000.0 / (49.0 * 6.0) / n);
  CHECK(std::fabs(m - 100.0 / 7.0) < 3 * se);

  acc = 0.0;
  const Distribution bin = Binomial(8, 0.25);
  for (int i = 0; i < n; ++i) acc += sample(bin, rng);
  const double se_bin = std::sqrt(8 * 0.25 * 0.75 / n);
  CHECK(std::fabs(acc / n - 2.0) < 3 * se_bin);
}

TEST_CASE("empirical KS distance under 0.01 at 1e5 draws") {
  for (const auto& d : continuous_variants()) {
    RandomStream rng(99);
    const int n = 100000;
    std::vector<double> xs(n);
    for (auto& x : xs) x = sample(d, rng);
    std::sort(xs.begin(), xs.end());
    double dmax = 0.0;
    for (int i = 0; i < n; ++i) {
      const double c = cdf(d, xs[i]);
      dmax = std::max(dmax, std::fabs(c - (i + 1.0) / n));
      dmax = std::max(dmax, std::fabs(c - static_cast<double>(i) / n));
    }
    CHECK(dmax < 0.01);
  }
}

TEST_CASE("invalid parameters rejected at construction") {
  CHECK_THROWS(Normal(0.0, 0.0));
  CHECK_THROWS(InvGamma(0.0, 1.0));
  CHECK_THROWS(InvGamma(1.0, -2.0));
  CHECK_THROWS(NonStdT(-1.0, 0.0, 1.0));
  CHECK_THROWS(ScaledBeta(4, 4, 0.2, -0.2));
  CHECK_THROWS(TruncNormal(1.0, 1.0));
  CHECK_THROWS(Binomial(-1, 0.5));
  CHECK_THROWS(Binomial(8, 1.5));
}

TEST_CASE("gridded log density normalizes and inverts") {
  // Unnormalized log of a Beta(3,7)-shaped density on [0,1].
  auto raw = [](double x) {
    if (x <= 0.0 || x >= 1.0) return -kInf;
    return 2.0 * std::log(x) + 6.0 * std::log1p(-x);
  };
  const GriddedLogDensity g(raw, Interval{0.0, 1.0}, SamplerKind::DirectInverseCdf);
  const double mass =
      trapezoid([&](double x) { return g.pdf(x); }, 0.0, 1.0, 20000);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  // Normalizer equals log Beta(3,7) analytically.
  const double logbeta = std::lgamma(3.0) + std::lgamma(7.0) - std::lgamma(10.0);
  CHECK(g.log_normalizer() == doctest::Approx(logbeta).epsilon(1e-9));
  for (double p : {0.05, 0.3, 0.5, 0.8, 0.99}) {
    CHECK(g.cdf(g.quantile(p)) == doctest::Approx(p).epsilon(1e-9));
  }
  // Inverse-cdf sampling tracks the cdf.
  RandomStream rng(4);
  const int n = 200000;
  std::vector<double> xs(n);
  for (auto& x : xs) x = g.sample(rng);
  std::sort(xs.begin(), xs.end());
  double dmax = 0.0;
  for (int i = 0; i < n; ++i) {
    dmax = std::max(dmax, std::fabs(g.cdf(xs[i]) - (i + 0.5) / n));
  }
  CHECK(dmax < 0.01);
}

TEST_CASE("adaptive trapezoid hits tight tolerances") {
  const double v = adaptive_trapezoid(
      [](double x) { return std::exp(-x * x / 2.0) / std::sqrt(2.0 * M_PI); }, -9.0, 9.0);
  CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
}
