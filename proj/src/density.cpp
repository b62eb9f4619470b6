#include "ioi/density.hpp"

#include <algorithm>
#include <cmath>

namespace ioi {

namespace {

// Trapezoid mass of exp(logf - shift) over an equally spaced grid.
double grid_mass(const std::function<double(double)>& logf, double lo, double hi, int n,
                 double shift) {
  const double h = (hi - lo) / (n - 1);
  double sum = 0.5 * (std::exp(logf(lo) - shift) + std::exp(logf(hi) - shift));
  for (int i = 1; i < n - 1; ++i) sum += std::exp(logf(lo + i * h) - shift);
  return sum * h;
}

}  // namespace

GriddedLogDensity::GriddedLogDensity(std::function<double(double)> unnorm_logpdf,
                                     Interval support, SamplerKind sampler, int initial_grid)
    : GriddedLogDensity(std::move(unnorm_logpdf), support, sampler, std::vector<double>{},
                        initial_grid) {}

GriddedLogDensity::GriddedLogDensity(std::function<double(double)> unnorm_logpdf,
                                     Interval support, SamplerKind sampler,
                                     std::vector<double> breakpoints, int initial_grid)
    : raw_(std::move(unnorm_logpdf)), support_(support), sampler_(sampler) {
  require(support_.finite() && support_.hi > support_.lo,
          "GriddedLogDensity: support must be a finite interval");
  require(initial_grid >= 16, "GriddedLogDensity: grid too small");

  // Piece boundaries: support endpoints plus interior jump locations.
  std::vector<double> bounds{support_.lo};
  std::sort(breakpoints.begin(), breakpoints.end());
  for (double b : breakpoints) {
    if (b > bounds.back() + 1e-14 * support_.width() && b < support_.hi) bounds.push_back(b);
  }
  bounds.push_back(support_.hi);
  const int pieces = static_cast<int>(bounds.size()) - 1;

  // Locate the scale of the density for stable exponentials.
  double shift = -kInf;
  for (int p = 0; p < pieces; ++p) {
    const int probe = 256;
    for (int i = 0; i <= probe; ++i) {
      const double x = bounds[p] + (i + 0.5) / (probe + 1.0) * (bounds[p + 1] - bounds[p]);
      shift = std::max(shift, raw_(x));
    }
  }
  require(std::isfinite(shift), "GriddedLogDensity: log-density is -inf everywhere probed");
  log_shift_ = shift;

  // Integrate each piece with a doubling grid; evaluation at piece edges is
  // nudged inward so one-sided limits are used at jumps.
  x_.clear();
  pdf_.clear();
  double total = 0.0;
  for (int p = 0; p < pieces; ++p) {
    const double lo = bounds[p], hi = bounds[p + 1];
    const double nudge = 1e-9 * (hi - lo);
    auto f = [&](double x) {
      const double xx = std::clamp(x, lo + nudge, hi - nudge);
      return raw_(xx);
    };
    int n = std::max(64, initial_grid / pieces);
    double mass = grid_mass(f, lo, hi, n + 1, shift);
    constexpr int kMaxNodes = 1 << 19;
    while (n < kMaxNodes) {
      const double refined = grid_mass(f, lo, hi, 2 * n + 1, shift);
      const double change = std::fabs(refined - mass);
      mass = refined;
      n *= 2;
      if (change <= 1e-10 * std::max(std::fabs(mass), 1e-3)) break;
    }
    total += mass;
    const double h = (hi - lo) / n;
    const int start = p == 0 ? 0 : 1;  // shared boundary node stored once
    for (int i = start; i <= n; ++i) {
      x_.push_back(i == 0 ? lo : (i == n ? hi : lo + i * h));
      pdf_.push_back(std::exp(f(x_.back()) - shift));
    }
  }
  require(std::isfinite(total) && total > 0.0, "GriddedLogDensity: unnormalizable density");
  log_norm_ = std::log(total) + shift;

  for (auto& v : pdf_) v /= total;
  cdf_.assign(x_.size(), 0.0);
  for (std::size_t i = 1; i < x_.size(); ++i) {
    cdf_[i] = cdf_[i - 1] + 0.5 * (pdf_[i] + pdf_[i - 1]) * (x_[i] - x_[i - 1]);
  }
  // Trapezoid mass of the normalized density is 1 up to roundoff; pin the
  // last node so cdf and quantile are exact inverses of each other.
  const double scale = cdf_.back();
  for (auto& c : cdf_) c = std::min(c / scale, 1.0);
}

double GriddedLogDensity::logpdf(double x) const {
  if (x < support_.lo || x > support_.hi) return -kInf;
  return raw_(x) - log_norm_;
}

double GriddedLogDensity::cdf(double x) const {
  if (x <= support_.lo) return 0.0;
  if (x >= support_.hi) return 1.0;
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double x0 = x_[i], x1 = x_[std::min(i + 1, x_.size() - 1)];
  if (x1 <= x0) return cdf_[i];
  const double f0 = pdf_[i], f1 = pdf_[i + 1];
  const double t = (x - x0) / (x1 - x0);
  const double fx = f0 + (f1 - f0) * t;
  return std::min(cdf_[i] + 0.5 * (f0 + fx) * (x - x0), 1.0);
}

double GriddedLogDensity::quantile(double p) const {
  require(p > 0.0 && p < 1.0, "GriddedLogDensity::quantile: p must lie in (0,1)");
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), p);
  std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
  if (i == 0) return x_.front();
  if (i >= cdf_.size()) return x_.back();
  --i;
  // Solve the piecewise-quadratic cdf on segment [x_i, x_{i+1}].
  const double x0 = x_[i], x1 = x_[i + 1];
  const double f0 = pdf_[i], f1 = pdf_[i + 1];
  const double dx = x1 - x0;
  const double target = p - cdf_[i];
  const double slope = (f1 - f0) / dx;
  if (std::fabs(slope) < 1e-300) {
    return f0 > 0.0 ? std::clamp(x0 + target / f0, x0, x1) : x0;
  }
  // 0.5*slope*t^2 + f0*t - target = 0 for t = x - x0.
  const double disc = f0 * f0 + 2.0 * slope * target;
  const double t = disc > 0.0 ? (-f0 + std::sqrt(disc)) / slope : target / std::max(f0, 1e-300);
  return std::clamp(x0 + t, x0, x1);
}

}  // namespace ioi
