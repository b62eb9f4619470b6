#include "ioi/distributions.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>

namespace ioi {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double lchoose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double binomial_logpmf(const Binomial& b, int k) {
  if (k < 0 || k > b.trials) return -kInf;
  if (b.p == 0.0) return k == 0 ? 0.0 : -kInf;
  if (b.p == 1.0) return k == b.trials ? 0.0 : -kInf;
  return lchoose(b.trials, k) + k * std::log(b.p) + (b.trials - k) * std::log1p(-b.p);
}

}  // namespace

Normal::Normal(double mean, double variance) : mean(mean), variance(variance) {
  require(std::isfinite(mean), "Normal: mean must be finite");
  require(std::isfinite(variance) && variance > 0.0, "Normal: variance must be positive");
}

InvGamma::InvGamma(double shape, double scale) : shape(shape), scale(scale) {
  require(std::isfinite(shape) && shape > 0.0, "InvGamma: shape must be positive");
  require(std::isfinite(scale) && scale > 0.0, "InvGamma: scale must be positive");
}

NonStdT::NonStdT(double df, double location, double scale)
    : df(df), location(location), scale(scale) {
  require(std::isfinite(df) && df > 0.0, "NonStdT: df must be positive");
  require(std::isfinite(location), "NonStdT: location must be finite");
  require(std::isfinite(scale) && scale > 0.0, "NonStdT: scale must be positive");
}

ScaledBeta::ScaledBeta(double a, double b, double lo, double hi) : a(a), b(b), lo(lo), hi(hi) {
  require(std::isfinite(a) && a > 0.0 && std::isfinite(b) && b > 0.0,
          "ScaledBeta: shapes must be positive");
  require(std::isfinite(lo) && std::isfinite(hi) && hi > lo, "ScaledBeta: need hi > lo");
}

TruncNormal::TruncNormal(double lo, double hi) : lo(lo), hi(hi) {
  require(std::isfinite(lo) && std::isfinite(hi) && hi > lo, "TruncNormal: need hi > lo");
  require(normal_cdf(hi) - normal_cdf(lo) > 0.0, "TruncNormal: interval carries no mass");
}

Binomial::Binomial(int trials, double p) : trials(trials), p(p) {
  require(trials >= 0, "Binomial: trials must be non-negative");
  require(p >= 0.0 && p <= 1.0, "Binomial: p must lie in [0,1]");
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.70710678118654752440); }

double normal_quantile(double p) { return quantile(Normal(0.0, 1.0), p); }

double logpdf(const Distribution& d, double x) {
  require(std::isfinite(x), "logpdf: x must be finite");
  return std::visit(
      [x](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Normal>) {
          const double r = x - v.mean;
          return -0.5 * (kLog2Pi + std::log(v.variance)) - r * r / (2.0 * v.variance);
        } else if constexpr (std::is_same_v<T, InvGamma>) {
          if (x <= 0.0) return -kInf;
          return v.shape * std::log(v.scale) - std::lgamma(v.shape) -
                 (v.shape + 1.0) * std::log(x) - v.scale / x;
        } else if constexpr (std::is_same_v<T, NonStdT>) {
          const double z = (x - v.location) / v.scale;
          return std::lgamma(0.5 * (v.df + 1.0)) - std::lgamma(0.5 * v.df) -
                 0.5 * std::log(v.df * 3.14159265358979323846) - std::log(v.scale) -
                 0.5 * (v.df + 1.0) * std::log1p(z * z / v.df);
        } else if constexpr (std::is_same_v<T, ScaledBeta>) {
          if (x <= v.lo || x >= v.hi) {
            // Endpoint densities are finite only for shape >= 1; report the
            // limit value at the closed endpoints, -inf outside.
            if (x < v.lo || x > v.hi) return -kInf;
            if ((x == v.lo && v.a < 1.0) || (x == v.hi && v.b < 1.0)) return kInf;
            if ((x == v.lo && v.a > 1.0) || (x == v.hi && v.b > 1.0)) return -kInf;
          }
          const double w = v.hi - v.lo;
          const double u = (x - v.lo) / w;
          const double logbeta =
              std::lgamma(v.a) + std::lgamma(v.b) - std::lgamma(v.a + v.b);
          return (v.a - 1.0) * std::log(u) + (v.b - 1.0) * std::log1p(-u) - logbeta -
                 std::log(w);
        } else if constexpr (std::is_same_v<T, TruncNormal>) {
          if (x < v.lo || x > v.hi) return -kInf;
          const double mass = normal_cdf(v.hi) - normal_cdf(v.lo);
          return -0.5 * (kLog2Pi + x * x) - std::log(mass);
        } else {  // Binomial
          const double k = std::round(x);
          if (std::fabs(x - k) > 1e-9) return -kInf;
          return binomial_logpmf(v, static_cast<int>(k));
        }
      },
      d);
}

double pdf(const Distribution& d, double x) { return std::exp(logpdf(d, x)); }

double cdf(const Distribution& d, double x) {
  require(std::isfinite(x), "cdf: x must be finite");
  return std::visit(
      [x](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Normal>) {
          return normal_cdf((x - v.mean) / std::sqrt(v.variance));
        } else if constexpr (std::is_same_v<T, InvGamma>) {
          if (x <= 0.0) return 0.0;
          return boost::math::gamma_q(v.shape, v.scale / x);
        } else if constexpr (std::is_same_v<T, NonStdT>) {
          // Complement form keeps full precision near the median, where
          // df/(df+z^2) would round to 1.
          const double z = (x - v.location) / v.scale;
          const double x2 = z * z / (v.df + z * z);
          const double half = 0.5 * boost::math::ibeta(0.5, 0.5 * v.df, x2);
          return z >= 0.0 ? 0.5 + half : 0.5 - half;
        } else if constexpr (std::is_same_v<T, ScaledBeta>) {
          if (x <= v.lo) return 0.0;
          if (x >= v.hi) return 1.0;
          return boost::math::ibeta(v.a, v.b, (x - v.lo) / (v.hi - v.lo));
        } else if constexpr (std::is_same_v<T, TruncNormal>) {
          if (x <= v.lo) return 0.0;
          if (x >= v.hi) return 1.0;
          const double flo = normal_cdf(v.lo);
          return (normal_cdf(x) - flo) / (normal_cdf(v.hi) - flo);
        } else {  // Binomial
          if (x < 0.0) return 0.0;
          const int k = static_cast<int>(std::floor(x + 1e-12));
          if (k >= v.trials) return 1.0;
          double acc = 0.0;
          for (int j = 0; j <= k; ++j) acc += std::exp(binomial_logpmf(v, j));
          return std::min(acc, 1.0);
        }
      },
      d);
}

namespace {

// Bracket-expansion hints for quantile bisection on unbounded supports.
void bracket(const Distribution& d, double p, double& lo, double& hi) {
  const Interval sup = support(d);
  if (sup.finite()) {
    lo = sup.lo;
    hi = sup.hi;
    return;
  }
  if (std::holds_alternative<InvGamma>(d)) {
    const auto& g = std::get<InvGamma>(d);
    const double mode = g.scale / (g.shape + 1.0);
    lo = mode;
    hi = mode;
    while (cdf(d, lo) >= p && lo > 1e-300) lo *= 0.5;
    while (cdf(d, hi) <= p && hi < 1e300) hi *= 2.0;
    return;
  }
  double center = 0.0, spread = 1.0;
  if (std::holds_alternative<Normal>(d)) {
    const auto& v = std::get<Normal>(d);
    center = v.mean;
    spread = std::sqrt(v.variance);
  } else if (std::holds_alternative<NonStdT>(d)) {
    const auto& v = std::get<NonStdT>(d);
    center = v.location;
    spread = v.scale;
  }
  double step = spread;
  lo = center - step;
  hi = center + step;
  while (cdf(d, lo) >= p && step < 1e300) {
    step *= 2.0;
    lo = center - step;
  }
  step = spread;
  while (cdf(d, hi) <= p && step < 1e300) {
    step *= 2.0;
    hi = center + step;
  }
}

}  // namespace

double quantile(const Distribution& d, double p) {
  require(!is_discrete(d), "quantile: discrete variant has no continuous inverse cdf");
  require(p > 0.0 && p < 1.0, "quantile: p must lie in (0,1)");
  double lo, hi;
  bracket(d, p, lo, hi);
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // double resolution exhausted
    (cdf(d, mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double sample(const Distribution& d, RandomStream& rng) {
  return std::visit(
      [&rng](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Normal>) {
          return v.mean + std::sqrt(v.variance) * rng.normal01();
        } else if constexpr (std::is_same_v<T, InvGamma>) {
          return v.scale / rng.gamma(v.shape);
        } else if constexpr (std::is_same_v<T, NonStdT>) {
          const double z = rng.normal01();
          const double chisq = 2.0 * rng.gamma(0.5 * v.df);
          return v.location + v.scale * z / std::sqrt(chisq / v.df);
        } else if constexpr (std::is_same_v<T, ScaledBeta>) {
          const double x = rng.gamma(v.a);
          const double y = rng.gamma(v.b);
          return v.lo + (v.hi - v.lo) * x / (x + y);
        } else if constexpr (std::is_same_v<T, TruncNormal>) {
          const double mass = normal_cdf(v.hi) - normal_cdf(v.lo);
          if (mass >= 0.1) {
            for (;;) {
              const double z = rng.normal01();
              if (z > v.lo && z < v.hi) return z;
            }
          }
          // Narrow interval: inverse cdf through the parent normal.
          const double u = normal_cdf(v.lo) + rng.uniform01() * mass;
          return quantile(Normal(0.0, 1.0), std::clamp(u, 1e-300, 1.0 - 1e-16));
        } else {  // Binomial
          int k = 0;
          for (int i = 0; i < v.trials; ++i) k += rng.uniform01() < v.p ? 1 : 0;
          return static_cast<double>(k);
        }
      },
      d);
}

Interval support(const Distribution& d) {
  return std::visit(
      [](const auto& v) -> Interval {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Normal> || std::is_same_v<T, NonStdT>) {
          return real_line();
        } else if constexpr (std::is_same_v<T, InvGamma>) {
          return positive_half_line();
        } else if constexpr (std::is_same_v<T, ScaledBeta>) {
          return Interval{v.lo, v.hi};
        } else if constexpr (std::is_same_v<T, TruncNormal>) {
          return Interval{v.lo, v.hi};
        } else {
          return Interval{0.0, static_cast<double>(v.trials)};
        }
      },
      d);
}

bool is_discrete(const Distribution& d) { return std::holds_alternative<Binomial>(d); }

double mean(const Distribution& d) {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Normal>) {
          return v.mean;
        } else if constexpr (std::is_same_v<T, InvGamma>) {
          return v.shape > 1.0 ? v.scale / (v.shape - 1.0) : kInf;
        } else if constexpr (std::is_same_v<T, NonStdT>) {
          return v.df > 1.0 ? v.location : kNaN;
        } else if constexpr (std::is_same_v<T, ScaledBeta>) {
          return v.lo + (v.hi - v.lo) * v.a / (v.a + v.b);
        } else if constexpr (std::is_same_v<T, TruncNormal>) {
          const double phi_lo = std::exp(-0.5 * (kLog2Pi + v.lo * v.lo));
          const double phi_hi = std::exp(-0.5 * (kLog2Pi + v.hi * v.hi));
          return (phi_lo - phi_hi) / (normal_cdf(v.hi) - normal_cdf(v.lo));
        } else {
          return v.trials * v.p;
        }
      },
      d);
}

}  // namespace ioi
