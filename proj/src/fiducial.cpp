#include "ioi/fiducial.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ioi::fiducial {

// ---------------------------------------------------------------------------
// GpdFunction

GpdFunction GpdFunction::constant(double level) {
  require(std::isfinite(level) && level > 0.0, "GpdFunction: level must be positive");
  GpdFunction g;
  g.kind_ = Kind::Constant;
  g.level_ = level;
  return g;
}

GpdFunction GpdFunction::constant_on(Interval support, double level) {
  require(std::isfinite(level) && level > 0.0, "GpdFunction: level must be positive");
  require(support.hi > support.lo, "GpdFunction: empty support");
  GpdFunction g;
  g.kind_ = Kind::ConstantOnSupport;
  g.level_ = level;
  g.region_ = support;
  return g;
}

GpdFunction GpdFunction::zero_on_interval(Interval hole, double level) {
  require(std::isfinite(level) && level > 0.0, "GpdFunction: level must be positive");
  require(hole.finite() && hole.hi > hole.lo, "GpdFunction: hole must be a finite interval");
  GpdFunction g;
  g.kind_ = Kind::ZeroOnInterval;
  g.level_ = level;
  g.region_ = hole;
  return g;
}

GpdFunction GpdFunction::interval_weighted(double nu, Distribution h) {
  require(std::isfinite(nu) && nu >= 0.0, "GpdFunction: nu must be non-negative");
  const Interval sup = ioi::support(h);
  require(sup.finite(), "GpdFunction: h must live on a finite interval");
  GpdFunction g;
  g.kind_ = Kind::IntervalWeighted;
  g.nu_ = nu;
  g.region_ = sup;
  g.h_ = std::move(h);
  return g;
}

double GpdFunction::operator()(double theta) const {
  switch (kind_) {
    case Kind::Constant:
      return level_;
    case Kind::ConstantOnSupport:
      return region_.contains(theta) ? level_ : 0.0;
    case Kind::ZeroOnInterval:
      return region_.contains(theta) ? 0.0 : level_;
    case Kind::IntervalWeighted:
      if (!region_.contains(theta)) return 0.0;
      return 1.0 + nu_ * ioi::pdf(*h_, theta);
  }
  return 0.0;
}

bool GpdFunction::flat_over(const Interval& range) const {
  switch (kind_) {
    case Kind::Constant:
      return true;
    case Kind::ConstantOnSupport:
      return region_.lo <= range.lo && region_.hi >= range.hi;
    case Kind::ZeroOnInterval:
      return region_.hi <= range.lo || region_.lo >= range.hi;
    case Kind::IntervalWeighted:
      return nu_ == 0.0 && region_.lo <= range.lo && region_.hi >= range.hi;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Mappings

FiducialMapping FiducialMapping::mean_shift(double observed, double sd) {
  require(std::isfinite(observed), "mean_shift: observed must be finite");
  require(std::isfinite(sd) && sd > 0.0, "mean_shift: sd must be positive");
  FiducialMapping m;
  m.forward = [sd](double gamma, double theta) { return theta + sd * gamma; };
  m.inverse_gamma = [observed, sd](double theta) { return (observed - theta) / sd; };
  m.inverse_theta = [observed, sd](double gamma) { return observed - sd * gamma; };
  m.jacobian = [sd](double) { return 1.0 / sd; };
  m.theta_domain = real_line();
  return m;
}

FiducialMapping FiducialMapping::positive_scale(double observed, int n) {
  require(std::isfinite(observed) && observed > 0.0, "positive_scale: observed must be positive");
  require(n >= 1, "positive_scale: n must be >= 1");
  const double c = n * observed;
  FiducialMapping m;
  m.forward = [n](double gamma, double theta) { return theta / (n * gamma); };
  m.inverse_gamma = [c](double theta) { return theta / c; };
  m.inverse_theta = [c](double gamma) { return c * gamma; };
  m.jacobian = [c](double) { return 1.0 / c; };
  m.theta_domain = positive_half_line();
  return m;
}

// ---------------------------------------------------------------------------
// Condition 1

namespace {

struct EffectiveGammaRange {
  double lo, hi;  // finite working range
  Interval true_bounds;
};

EffectiveGammaRange effective_gamma_range(const Distribution& pi0) {
  const Interval sup = support(pi0);
  double lo = sup.lo, hi = sup.hi;
  if (!std::isfinite(lo)) lo = quantile(pi0, 1e-12);
  if (!std::isfinite(hi)) hi = quantile(pi0, 1.0 - 1e-12);
  require(hi > lo, "check_condition1: empty primary-variable support");
  return {lo, hi, sup};
}

bool strictly_monotone(const std::vector<double>& v) {
  if (v.size() < 2) return false;
  const bool inc = v.back() > v.front();
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (inc ? v[i] <= v[i - 1] : v[i] >= v[i - 1]) return false;
  }
  return true;
}

}  // namespace

bool check_condition1(const FiducialModel& m, int grid_size) {
  require(grid_size >= 100, "check_condition1: grid_size must be >= 100");
  const EffectiveGammaRange g = effective_gamma_range(m.pi0);

  if (!m.mapping.inverse_gamma) return false;  // step relation, no functional inverse

  if (m.mapping.chart) {
    // Grid the parameter through the mapping's chart and trace the primary
    // values; the feasible block must be contiguous, strictly monotone, and
    // bracketed by points beyond both support endpoints.
    const int n = grid_size;
    std::vector<double> gamma(n + 1);
    for (int i = 0; i <= n; ++i) {
      const double theta = m.mapping.chart(static_cast<double>(i) / n);
      gamma[i] = m.mapping.inverse_gamma(theta);
    }
    const double blo = std::isfinite(g.true_bounds.lo) ? g.true_bounds.lo : g.lo;
    const double bhi = std::isfinite(g.true_bounds.hi) ? g.true_bounds.hi : g.hi;
    int first = -1, last = -1;
    for (int i = 0; i <= n; ++i) {
      const bool feasible = gamma[i] > blo && gamma[i] < bhi;
      if (feasible) {
        if (first < 0) first = i;
        if (last >= 0 && i > last + 1) return false;  // disconnected feasible set
        last = i;
      }
    }
    if (first < 0) return false;
    if (first == 0 || last == n) return false;  // chart does not bracket the block
    std::vector<double> block(gamma.begin() + first, gamma.begin() + last + 1);
    if (!strictly_monotone(block)) return false;
    const bool decreasing = block.back() < block.front();
    const double before = gamma[first - 1], after = gamma[last + 1];
    if (decreasing) return before >= bhi && after <= blo;
    return before <= blo && after >= bhi;
  }

  if (m.mapping.inverse_theta) {
    // Closed-form inverse: verify monotonicity, domain membership and
    // forward/backward consistency over a primary-variable grid.
    const int n = grid_size;
    std::vector<double> theta(n);
    for (int i = 0; i < n; ++i) {
      const double gi = g.lo + (i + 0.5) * (g.hi - g.lo) / n;
      const double th = m.mapping.inverse_theta(gi);
      if (!std::isfinite(th) || !m.mapping.theta_domain.contains(th)) return false;
      const double back = m.mapping.inverse_gamma(th);
      if (std::fabs(back - gi) > 1e-6 * std::max(1.0, std::fabs(gi))) return false;
      theta[i] = th;
    }
    return strictly_monotone(theta);
  }

  return false;
}

// ---------------------------------------------------------------------------
// pi1 and the fiducial density

namespace {

// theta(gamma) via the chart when no closed-form inverse exists; valid once
// the bijectivity check has passed.
std::function<double(double)> make_inverse_theta(const FiducialModel& m) {
  if (m.mapping.inverse_theta) return m.mapping.inverse_theta;
  require(static_cast<bool>(m.mapping.chart), "fiducial: mapping has no usable inverse");
  const auto chart = m.mapping.chart;
  const auto inv_gamma = m.mapping.inverse_gamma;
  // Locate the feasible block in chart coordinates once. The block spans a
  // sizable fraction of any well-formed chart, so a moderate scan suffices;
  // the bisection below does the precision work.
  const EffectiveGammaRange g = effective_gamma_range(m.pi0);
  const double blo = std::isfinite(g.true_bounds.lo) ? g.true_bounds.lo : g.lo;
  const double bhi = std::isfinite(g.true_bounds.hi) ? g.true_bounds.hi : g.hi;
  const int n = 1024;
  double ulo = -1.0, uhi = -1.0;
  double prev_u = 0.0;
  bool in_block = false;
  for (int i = 0; i <= n; ++i) {
    const double u = static_cast<double>(i) / n;
    const double ga = inv_gamma(chart(u));
    const bool feasible = ga > blo && ga < bhi;
    if (feasible && !in_block) {
      ulo = i == 0 ? u : prev_u;
      in_block = true;
    }
    if (!feasible && in_block) {
      uhi = u;
      break;
    }
    prev_u = u;
  }
  if (in_block && uhi < 0.0) uhi = 1.0;
  require(ulo >= 0.0 && uhi > ulo, "fiducial: empty feasible block");
  const bool decreasing = inv_gamma(chart(uhi)) < inv_gamma(chart(ulo));
  return [chart, inv_gamma, ulo, uhi, decreasing](double target) {
    double a = ulo, b = uhi;
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
      const double mid = 0.5 * (a + b);
      const double val = inv_gamma(chart(mid));
      const bool go_right = decreasing ? val > target : val < target;
      (go_right ? a : b) = mid;
    }
    return chart(0.5 * (a + b));
  };
}

Interval theta_image(const FiducialModel& m, const std::function<double(double)>& inv_theta,
                     bool* gamma_decreasing_out) {
  const EffectiveGammaRange g = effective_gamma_range(m.pi0);
  const double th_lo_g = inv_theta(std::isfinite(g.true_bounds.lo) ? g.true_bounds.lo
                                                                   : g.lo);
  const double th_hi_g = inv_theta(std::isfinite(g.true_bounds.hi) ? g.true_bounds.hi
                                                                   : g.hi);
  const bool theta_decreasing_in_gamma = th_hi_g < th_lo_g;
  if (gamma_decreasing_out) *gamma_decreasing_out = theta_decreasing_in_gamma;
  double lo = std::min(th_lo_g, th_hi_g);
  double hi = std::max(th_lo_g, th_hi_g);
  // Sides driven by an infinite primary support extend to the domain edge.
  if (!std::isfinite(g.true_bounds.lo)) {
    if (theta_decreasing_in_gamma) {
      hi = m.mapping.theta_domain.hi;
    } else {
      lo = m.mapping.theta_domain.lo;
    }
  }
  if (!std::isfinite(g.true_bounds.hi)) {
    if (theta_decreasing_in_gamma) {
      lo = m.mapping.theta_domain.lo;
    } else {
      hi = m.mapping.theta_domain.hi;
    }
  }
  return {lo, hi};
}

}  // namespace

Pi1Density build_pi1_impl(const FiducialModel& m, bool check) {
  if (check) {
    require(check_condition1(m), "build_pi1: bijectivity condition fails for this model");
  }
  Pi1Density out(m.pi0);
  const auto inv_theta = make_inverse_theta(m);
  const Interval h_x = theta_image(m, inv_theta, nullptr);

  if (m.gpd.flat_over(h_x)) {
    out.strong_ = true;
    out.support_ = support(m.pi0);
    return out;
  }

  const EffectiveGammaRange g = effective_gamma_range(m.pi0);
  const Distribution pi0 = m.pi0;
  const GpdFunction gpd = m.gpd;
  auto raw = [pi0, gpd, inv_theta](double gamma) {
    const double w = gpd(inv_theta(gamma));
    if (!(w > 0.0)) return -kInf;
    return std::log(w) + ioi::logpdf(pi0, gamma);
  };
  // The weight can jump where the GPD region starts or ends; hand those
  // locations to the grid so the normalizer stays accurate.
  std::vector<double> breaks;
  if (m.gpd.kind() != GpdFunction::Kind::Constant) {
    const Interval region = m.gpd.region();
    for (double edge : {region.lo, region.hi}) {
      if (!std::isfinite(edge)) continue;
      const double ga = m.mapping.inverse_gamma(edge);
      if (std::isfinite(ga) && ga > g.lo && ga < g.hi) breaks.push_back(ga);
    }
  }
  out.grid_ = std::make_shared<GriddedLogDensity>(raw, Interval{g.lo, g.hi},
                                                  SamplerKind::Metropolis, std::move(breaks),
                                                  4096);
  out.support_ = Interval{g.lo, g.hi};
  return out;
}

Pi1Density build_pi1(const FiducialModel& m) { return build_pi1_impl(m, true); }

double Pi1Density::logpdf(double gamma) const {
  if (strong_) return ioi::logpdf(pi0_, gamma);
  return grid_->logpdf(gamma);
}

double Pi1Density::cdf(double gamma) const {
  if (strong_) return ioi::cdf(pi0_, gamma);
  return grid_->cdf(gamma);
}

FiducialDensity::FiducialDensity(Pi1Density pi1, const FiducialModel& m, bool gamma_decreasing,
                                 Interval theta_support)
    : pi1_(std::move(pi1)),
      inverse_gamma_(m.mapping.inverse_gamma),
      jacobian_(m.mapping.jacobian),
      gamma_decreasing_(gamma_decreasing),
      theta_support_(theta_support) {}

double FiducialDensity::logpdf(double theta) const {
  if (theta <= theta_support_.lo || theta >= theta_support_.hi) return -kInf;
  const double gamma = inverse_gamma_(theta);
  const double jac = jacobian_(theta);
  if (!std::isfinite(gamma) || !(jac > 0.0)) return -kInf;
  return pi1_.logpdf(gamma) + std::log(jac);
}

double FiducialDensity::cdf(double theta) const {
  if (theta <= theta_support_.lo) return 0.0;
  if (theta >= theta_support_.hi) return 1.0;
  const double c = pi1_.cdf(inverse_gamma_(theta));
  return std::clamp(gamma_decreasing_ ? 1.0 - c : c, 0.0, 1.0);
}

FiducialDensity fiducial_density_impl(const FiducialModel& m, bool check) {
  Pi1Density pi1 = build_pi1_impl(m, check);
  const auto inv_theta = make_inverse_theta(m);
  bool gamma_decreasing = false;
  const Interval h_x = theta_image(m, inv_theta, &gamma_decreasing);
  return FiducialDensity(std::move(pi1), m, gamma_decreasing, h_x);
}

FiducialDensity fiducial_density(const FiducialModel& m) {
  return fiducial_density_impl(m, true);
}

FiducialDensity fiducial_density_unchecked(const FiducialModel& m) {
  return fiducial_density_impl(m, false);
}

// ---------------------------------------------------------------------------
// Closed-form conditionals and their model factories

Distribution normal_mean_conditional(double xbar, double sigma2, int n) {
  require(n >= 1, "normal_mean_conditional: n must be >= 1");
  require(std::isfinite(sigma2) && sigma2 > 0.0, "normal_mean_conditional: sigma2 > 0");
  return Normal(xbar, sigma2 / n);
}

Distribution variance_conditional(double sigma_hat2, int n) {
  require(n >= 1, "variance_conditional: n must be >= 1");
  require(std::isfinite(sigma_hat2) && sigma_hat2 > 0.0, "variance_conditional: sigma_hat2 > 0");
  return InvGamma(0.5 * n, 0.5 * n * sigma_hat2);
}

FiducialModel normal_mean_model(double xbar, double sigma2, int n, GpdFunction gpd) {
  require(n >= 1 && sigma2 > 0.0, "normal_mean_model: bad arguments");
  FiducialModel m{xbar, Normal(0.0, 1.0),
                  FiducialMapping::mean_shift(xbar, std::sqrt(sigma2 / n)), std::move(gpd)};
  return m;
}

FiducialModel variance_model(double sigma_hat2, int n, GpdFunction gpd) {
  require(n >= 1 && sigma_hat2 > 0.0, "variance_model: bad arguments");
  // Primary variable is the reciprocal of the usual chi-square scaling, so
  // the relation is linear in the primary variable and its pre-data density
  // is InvGamma(n/2, 1/2).
  FiducialModel m{sigma_hat2, InvGamma(0.5 * n, 0.5),
                  FiducialMapping::positive_scale(sigma_hat2, n), std::move(gpd)};
  return m;
}

// ---------------------------------------------------------------------------
// Discrete step inversion

namespace {

double binomial_logmass(int trials, int k, double p) {
  if (p <= 0.0) return k == 0 ? 0.0 : -kInf;
  if (p >= 1.0) return k == trials ? 0.0 : -kInf;
  const double lc = std::lgamma(trials + 1.0) - std::lgamma(k + 1.0) -
                    std::lgamma(trials - k + 1.0);
  double out = lc;
  if (k > 0) out += k * std::log(p);
  if (trials - k > 0) out += (trials - k) * std::log1p(-p);
  return out;
}

}  // namespace

GriddedLogDensity discrete_fiducial_stepinv(int x2, int trials, double pi1_known,
                                            const GpdFunction& lpd) {
  require(trials > 0, "discrete_fiducial_stepinv: trials must be positive");
  require(x2 >= 0 && x2 <= trials, "discrete_fiducial_stepinv: need 0 <= x2 <= trials");
  require(pi1_known >= 0.0 && pi1_known < 1.0, "discrete_fiducial_stepinv: pi1 in [0,1)");
  if (lpd.kind() != GpdFunction::Kind::Constant &&
      lpd.kind() != GpdFunction::Kind::ConstantOnSupport) {
    throw std::invalid_argument(
        "discrete_fiducial_stepinv: non-uniform LPD functions are unsupported");
  }
  const double budget = 1.0 - pi1_known;
  auto raw = [x2, trials, budget](double pi2) {
    return binomial_logmass(trials, x2, pi2 / budget);
  };
  return GriddedLogDensity(raw, Interval{0.0, budget}, SamplerKind::DirectInverseCdf);
}

FiducialModel discrete_step_model(int x2, int trials, double pi1_known) {
  require(trials > 0, "discrete_step_model: trials must be positive");
  require(x2 >= 0 && x2 <= trials, "discrete_step_model: need 0 <= x2 <= trials");
  require(pi1_known >= 0.0 && pi1_known < 1.0, "discrete_step_model: pi1 in [0,1)");
  const double budget = 1.0 - pi1_known;
  FiducialMapping map;
  map.forward = [trials, budget](double gamma, double pi2) {
    const double p = pi2 / budget;
    double cum = 0.0;
    for (int y = 0; y <= trials; ++y) {
      cum += std::exp(binomial_logmass(trials, y, p));
      if (gamma < cum) return static_cast<double>(y);
    }
    return static_cast<double>(trials);
  };
  // No functional inverse: positive-measure gamma-intervals share one count.
  map.inverse_gamma = nullptr;
  map.inverse_theta = nullptr;
  map.jacobian = nullptr;
  map.theta_domain = Interval{0.0, budget};
  return FiducialModel{static_cast<double>(x2), ScaledBeta(1.0, 1.0, 0.0, 1.0), std::move(map),
                       GpdFunction::constant_on(Interval{0.0, budget}, 1.0)};
}

// ---------------------------------------------------------------------------
// Correlation mapping

namespace {

FiducialModel tau_model_unchecked(double tau_hat, int n, double v) {
  require(std::fabs(tau_hat) < 1.0, "tau_mapping: |tau_hat| must be < 1");
  require(n >= 4, "tau_mapping: n must be >= 4");
  require(std::isfinite(v) && v > 0.0, "tau_mapping: v must be positive");
  const double uh = std::atanh(tau_hat);
  const double rootn = std::sqrt(static_cast<double>(n));
  FiducialMapping map;
  map.forward = [rootn](double gamma, double tau) {
    return std::atanh(tau) + gamma / (rootn * std::sqrt(1.0 + tau * tau));
  };
  map.inverse_gamma = [uh, rootn](double tau) {
    return (uh - std::atanh(tau)) * rootn * std::sqrt(1.0 + tau * tau);
  };
  map.inverse_theta = nullptr;
  map.jacobian = [uh, rootn](double tau) {
    const double s = std::sqrt(1.0 + tau * tau);
    const double d = -s / (1.0 - tau * tau) + (uh - std::atanh(tau)) * tau / s;
    return rootn * std::fabs(d);
  };
  map.theta_domain = Interval{-1.0, 1.0};
  const double half = 1.2 * v / rootn + 1.0;
  map.chart = [uh, half](double u) { return std::tanh(uh - half + 2.0 * half * u); };
  return FiducialModel{uh, TruncNormal(-v, v), std::move(map),
                       GpdFunction::constant_on(Interval{-1.0, 1.0}, 1.0)};
}

}  // namespace

FiducialModel tau_mapping(double tau_hat, int n, double v) {
  FiducialModel m = tau_model_unchecked(tau_hat, n, v);
  if (!check_condition1(m)) {
    throw std::domain_error("tau_mapping: bijectivity condition fails at this truncation");
  }
  return m;
}

double select_truncation_v(int n, double tau_hat) {
  require(std::fabs(tau_hat) < 1.0, "select_truncation_v: |tau_hat| must be < 1");
  auto admissible = [&](double v) {
    return check_condition1(tau_model_unchecked(tau_hat, n, v));
  };
  constexpr double kCap = 1000.0;
  if (!admissible(1.0)) {
    throw std::runtime_error("select_truncation_v: no admissible truncation at v >= 1");
  }
  if (admissible(kCap)) return 0.99 * kCap;
  double lo = 1.0, hi = kCap;  // lo admissible, hi not
  while (hi - lo > 1e-3 * lo) {
    const double mid = 0.5 * (lo + hi);
    (admissible(mid) ? lo : hi) = mid;
  }
  return 0.99 * lo;
}

}  // namespace ioi::fiducial
