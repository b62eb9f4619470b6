#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "ioi/common.hpp"
#include "ioi/distributions.hpp"

namespace ioi {

/// A normalized univariate density. Implementations are immutable after
/// construction and safe to share across threads.
class Density {
 public:
  virtual ~Density() = default;
  virtual double logpdf(double x) const = 0;
  virtual double cdf(double x) const = 0;
  virtual Interval support() const = 0;
  double pdf(double x) const { return std::exp(logpdf(x)); }
};

/// Distribution wrapped as a Density.
class DistributionDensity final : public Density {
 public:
  explicit DistributionDensity(Distribution d) : dist_(std::move(d)) {}
  double logpdf(double x) const override { return ioi::logpdf(dist_, x); }
  double cdf(double x) const override { return ioi::cdf(dist_, x); }
  Interval support() const override { return ioi::support(dist_); }
  const Distribution& dist() const { return dist_; }

 private:
  Distribution dist_;
};

enum class SamplerKind { DirectInverseCdf, Metropolis };

/// A density known only through an unnormalized log-density on a finite
/// interval. The normalizer comes from trapezoid quadrature on a grid that
/// doubles from 4096 nodes until the normalizer moves by less than 1e-10
/// relative; the same grid backs cdf, quantile and inverse-cdf sampling.
class GriddedLogDensity final : public Density {
 public:
  GriddedLogDensity(std::function<double(double)> unnorm_logpdf, Interval support,
                    SamplerKind sampler, int initial_grid = 4096);

  /// As above, but with known interior jump locations: the grid is built and
  /// integrated piecewise so discontinuities cost no accuracy.
  GriddedLogDensity(std::function<double(double)> unnorm_logpdf, Interval support,
                    SamplerKind sampler, std::vector<double> breakpoints, int initial_grid);

  double logpdf(double x) const override;  // normalized
  double cdf(double x) const override;
  Interval support() const override { return support_; }

  double quantile(double p) const;
  double sample(RandomStream& rng) const { return quantile(rng.uniform01()); }

  SamplerKind sampler() const { return sampler_; }
  /// log of the integral of the raw (unnormalized) density over the support.
  double log_normalizer() const { return log_norm_; }
  int grid_size() const { return static_cast<int>(x_.size()); }

 private:
  std::function<double(double)> raw_;
  Interval support_;
  SamplerKind sampler_;
  double log_shift_ = 0.0;  // max raw log over the grid
  double log_norm_ = 0.0;
  std::vector<double> x_;
  std::vector<double> pdf_;   // normalized density at nodes
  std::vector<double> cdf_;   // cumulative trapezoid, clamped to [0,1]
};

}  // namespace ioi
