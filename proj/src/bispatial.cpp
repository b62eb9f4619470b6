#include "ioi/bispatial.hpp"

#include <algorithm>
#include <cmath>

#include "ioi/quadrature.hpp"

namespace ioi::bispatial {

PdoCurve PdoCurve::power_law(double exponent) {
  require(std::isfinite(exponent) && exponent > 0.0, "PdoCurve: exponent must be positive");
  PdoCurve c;
  c.kind_ = Kind::PowerLaw;
  c.exponent_ = exponent;
  return c;
}

PdoCurve PdoCurve::table(std::vector<std::pair<double, double>> points) {
  require(points.size() >= 2, "PdoCurve: table needs at least two points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    require(points[i].first >= 0.0 && points[i].first <= 1.0 && points[i].second >= 0.0 &&
                points[i].second <= 1.0,
            "PdoCurve: table entries must lie in the unit square");
    if (i > 0) {
      require(points[i].first > points[i - 1].first, "PdoCurve: p values must increase");
      require(points[i].second >= points[i - 1].second, "PdoCurve: kappa must be non-decreasing");
    }
  }
  require(points.back().first == 1.0 && points.back().second == 1.0,
          "PdoCurve: table must end at (1,1)");
  PdoCurve c;
  c.kind_ = Kind::Table;
  c.points_ = std::move(points);
  return c;
}

double PdoCurve::operator()(double p) const {
  if (kind_ == Kind::PowerLaw) return std::pow(p, exponent_);
  auto hi = std::lower_bound(points_.begin(), points_.end(), p,
                             [](const auto& pt, double v) { return pt.first < v; });
  if (hi == points_.begin()) return points_.front().second;
  const auto lo = hi - 1;
  const double t = (p - lo->first) / (hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

Orientation choose_orientation(double F_at_theta0, double Fprime_at_theta1) {
  require(F_at_theta0 >= 0.0 && F_at_theta0 <= 1.0 && Fprime_at_theta1 >= 0.0 &&
              Fprime_at_theta1 <= 1.0,
          "choose_orientation: arguments must be probabilities");
  return F_at_theta0 <= Fprime_at_theta1 ? Orientation::Lower : Orientation::Upper;
}

double one_sided_pvalue(double statistic, double null_value, double sd, Orientation side) {
  require(std::isfinite(statistic) && std::isfinite(null_value), "one_sided_pvalue: bad inputs");
  require(std::isfinite(sd) && sd > 0.0, "one_sided_pvalue: sd must be positive");
  const double z = (statistic - null_value) / sd;
  return side == Orientation::Lower ? normal_cdf(z) : 1.0 - normal_cdf(z);
}

double pdo_kappa(const PdoCurve& c, double p) {
  require(p > 0.0, "pdo_kappa: degenerate P value");
  require(p <= 1.0, "pdo_kappa: p must lie in (0,1]");
  return c(p);
}

BispatialSpec::BispatialSpec(Interval interval, Distribution h, PdoCurve pdo,
                             std::shared_ptr<const Density> f_s, Orientation orientation)
    : interval(interval), h(std::move(h)), pdo(std::move(pdo)), f_s(std::move(f_s)),
      orientation(orientation) {
  require(interval.finite(), "BispatialSpec: interval must be finite");
  require(interval.hi > interval.lo,
          "BispatialSpec: zero-width interval (point-mass case) is not supported");
  require(static_cast<bool>(this->f_s), "BispatialSpec: missing neutral density");
  const Interval hs = ioi::support(this->h);
  require(std::fabs(hs.lo - interval.lo) < 1e-12 * std::max(1.0, std::fabs(interval.lo)) &&
              std::fabs(hs.hi - interval.hi) < 1e-12 * std::max(1.0, std::fabs(interval.hi)),
          "BispatialSpec: h must live exactly on the interval");
  require(ioi::pdf(this->h, hs.lo) == 0.0 && ioi::pdf(this->h, hs.hi) == 0.0,
          "BispatialSpec: h must vanish at the interval endpoints");
}

double neutral_probability(const BispatialSpec& spec) {
  return spec.orientation == Orientation::Lower ? 1.0 - spec.f_s->cdf(spec.interval.lo)
                                                : spec.f_s->cdf(spec.interval.hi);
}

double interval_mass(const BispatialSpec& spec) {
  auto integrand = [&](double x) { return ioi::pdf(spec.h, x) * spec.f_s->pdf(x); };
  return adaptive_trapezoid(integrand, spec.interval.lo, spec.interval.hi, 1e-13, 1e-12, 128);
}

namespace {

double solve_nu_given_mass(double kappa, double a, double m_h) {
  require(std::isfinite(kappa), "solve_nu: kappa must be finite");
  if (kappa >= 1.0) throw std::domain_error("solve_nu: kappa must be below one");
  if (kappa < a) throw std::domain_error("solve_nu: kappa below neutral fiducial probability");
  require(m_h > 0.0, "solve_nu: neutral density carries no interval mass");
  return std::max((kappa - a) / ((1.0 - kappa) * m_h), 0.0);
}

}  // namespace

double solve_nu(const BispatialSpec& spec, double kappa) {
  return solve_nu_given_mass(kappa, neutral_probability(spec), interval_mass(spec));
}

BDensity::BDensity(BispatialSpec spec, double nu, double kappa, double m_h, bool with_cdf_cache)
    : spec_(std::move(spec)), f_s_(spec_.f_s), nu_(nu), kappa_(kappa), m_h_(m_h),
      c_(1.0 / (1.0 + nu * m_h)) {
  if (!with_cdf_cache) return;
  const int n = 2048;
  cache_x_.resize(n + 1);
  std::vector<double> vals(n + 1);
  const double lo = spec_.interval.lo, w = spec_.interval.width();
  for (int i = 0; i <= n; ++i) {
    cache_x_[i] = lo + w * i / n;
    vals[i] = nu_ * ioi::pdf(spec_.h, cache_x_[i]) * f_s_->pdf(cache_x_[i]);
  }
  cache_w_ = cumulative_trapezoid(cache_x_, vals);
}

double BDensity::logpdf(double theta) const {
  const double base = f_s_->logpdf(theta);
  if (!std::isfinite(base)) return base;
  double out = std::log(c_) + base;
  if (spec_.interval.contains(theta)) {
    out += std::log1p(nu_ * ioi::pdf(spec_.h, theta));
  }
  return out;
}

double BDensity::cdf(double theta) const {
  const double base = f_s_->cdf(theta);
  double extra = 0.0;
  if (theta >= spec_.interval.hi) {
    extra = nu_ * m_h_;
  } else if (theta > spec_.interval.lo) {
    if (!cache_x_.empty()) {
      const auto it = std::upper_bound(cache_x_.begin(), cache_x_.end(), theta);
      const std::size_t i = static_cast<std::size_t>(it - cache_x_.begin()) - 1;
      const double t = (theta - cache_x_[i]) / (cache_x_[i + 1] - cache_x_[i]);
      extra = cache_w_[i] + t * (cache_w_[i + 1] - cache_w_[i]);
    } else {
      extra = nu_ * adaptive_trapezoid(
                        [&](double x) { return ioi::pdf(spec_.h, x) * f_s_->pdf(x); },
                        spec_.interval.lo, theta, 1e-13, 1e-12, 128);
    }
  }
  return std::clamp(c_ * (base + extra), 0.0, 1.0);
}

double BDensity::hypothesis_probability() const {
  const double a = neutral_probability(spec_);
  return c_ * (a + nu_ * m_h_);
}

BDensity build_b_density(const BispatialSpec& spec, double kappa, bool with_cdf_cache) {
  const double m_h = interval_mass(spec);
  const double nu = solve_nu_given_mass(kappa, neutral_probability(spec), m_h);
  return BDensity(spec, nu, kappa, m_h, with_cdf_cache);
}

}  // namespace ioi::bispatial
