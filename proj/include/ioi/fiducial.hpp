#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "ioi/common.hpp"
#include "ioi/density.hpp"
#include "ioi/distributions.hpp"

namespace ioi::fiducial {

/// Global pre-data weight over the parameter: non-negative, locally
/// integrable, defined only up to a positive constant.
class GpdFunction {
 public:
  enum class Kind { Constant, ConstantOnSupport, ZeroOnInterval, IntervalWeighted };

  /// Positive level over the whole parameter space.
  static GpdFunction constant(double level);
  /// Positive level on the stated support, zero outside.
  static GpdFunction constant_on(Interval support, double level);
  /// Zero on the stated interval, positive level elsewhere.
  static GpdFunction zero_on_interval(Interval hole, double level);
  /// 1 + nu * h(theta) on the support of h, zero outside; h continuous
  /// unimodal and vanishing at its endpoints.
  static GpdFunction interval_weighted(double nu, Distribution h);

  double operator()(double theta) const;
  Kind kind() const { return kind_; }
  /// True when the weight is a single positive constant over all of `range`.
  bool flat_over(const Interval& range) const;
  /// Support / hole / h-interval, depending on the kind.
  Interval region() const { return region_; }
  double level() const { return level_; }
  double nu() const { return nu_; }

 private:
  GpdFunction() = default;
  Kind kind_ = Kind::Constant;
  double level_ = 1.0;
  Interval region_{};  // support / hole / h-interval depending on kind
  double nu_ = 0.0;
  std::optional<Distribution> h_;
};

/// The statistic relation q = forward(gamma, theta) with its inverses. For
/// step (discrete) relations inverse_gamma is empty: whole gamma-intervals
/// map to one observed value, so no functional inverse exists.
struct FiducialMapping {
  std::function<double(double, double)> forward;  // (gamma, theta) -> statistic
  std::function<double(double)> inverse_gamma;    // theta -> gamma, at the observed statistic
  std::function<double(double)> inverse_theta;    // gamma -> theta (closed form when known)
  std::function<double(double)> jacobian;         // theta -> |d gamma / d theta|
  Interval theta_domain = real_line();
  /// Optional strictly monotone reparametrization u in [0,1] -> theta used
  /// by the bijectivity check; it must extend beyond the feasible set on
  /// both sides. Required when inverse_theta is absent.
  std::function<double(double)> chart;

  /// observed = theta + sd * gamma.
  static FiducialMapping mean_shift(double observed, double sd);
  /// observed = theta / (n * gamma) with theta > 0, i.e. theta = n*observed*gamma.
  static FiducialMapping positive_scale(double observed, int n);
};

struct FiducialModel {
  double q_observed;
  Distribution pi0;  // primary r.v. pre-data density, parameter-free
  FiducialMapping mapping;
  GpdFunction gpd;
};

/// Numeric surrogate for the bijectivity condition between the feasible
/// primary-variable set and the feasible parameter set: strict monotonicity
/// plus endpoint coverage on a dense grid. Grid default 10^4.
bool check_condition1(const FiducialModel& m, int grid_size = 10000);

/// Post-data density of the primary r.v.: proportional to
/// gpd(theta(gamma)) * pi0(gamma) on the feasible set.
class Pi1Density {
 public:
  double logpdf(double gamma) const;
  double pdf(double gamma) const { return std::exp(logpdf(gamma)); }
  double cdf(double gamma) const;
  Interval support() const { return support_; }
  /// True when the weight was flat, so the post-data density equals pi0.
  bool strong() const { return strong_; }

 private:
  friend Pi1Density build_pi1_impl(const FiducialModel&, bool);
  Distribution pi0_;
  bool strong_ = false;
  Interval support_{};
  std::shared_ptr<const GriddedLogDensity> grid_;  // null in the strong case

 public:
  explicit Pi1Density(Distribution pi0) : pi0_(std::move(pi0)) {}
};

Pi1Density build_pi1(const FiducialModel& m);

/// Full conditional density of the parameter, obtained from Pi1Density by
/// the change of variables through the mapping.
class FiducialDensity final : public Density {
 public:
  double logpdf(double theta) const override;
  double cdf(double theta) const override;
  Interval support() const override { return theta_support_; }

 private:
  friend FiducialDensity fiducial_density_impl(const FiducialModel&, bool);
  FiducialDensity(Pi1Density pi1, const FiducialModel& m, bool gamma_decreasing,
                  Interval theta_support);
  Pi1Density pi1_;
  std::function<double(double)> inverse_gamma_;
  std::function<double(double)> jacobian_;
  bool gamma_decreasing_;
  Interval theta_support_;
};

FiducialDensity fiducial_density(const FiducialModel& m);
/// Same construction without re-running the bijectivity check; for callers
/// that already validated the model (e.g. per-sweep scenario updates).
FiducialDensity fiducial_density_unchecked(const FiducialModel& m);

/// Mean of a normal sample with known variance: Normal(xbar, sigma2/n).
Distribution normal_mean_conditional(double xbar, double sigma2, int n);

/// Variance of a normal sample centered at a known mean:
/// InvGamma(n/2, n*sigma_hat2/2).
Distribution variance_conditional(double sigma_hat2, int n);

// Model factories matching the two conditionals above (generic-path oracles).
FiducialModel normal_mean_model(double xbar, double sigma2, int n, GpdFunction gpd);
FiducialModel variance_model(double sigma_hat2, int n, GpdFunction gpd);

/// Step-inversion instance for a count x2 out of `trials` given a known
/// remaining-proportion budget 1 - pi1_known. Under the step inversion the
/// set of primary values yielding x2 has measure equal to the count's
/// conditional probability mass, so the density over pi2 is proportional to
/// lpd(pi2) times that mass, normalized on [0, 1 - pi1_known]. Only
/// constant local pre-data weights are supported.
GriddedLogDensity discrete_fiducial_stepinv(int x2, int trials, double pi1_known,
                                            const GpdFunction& lpd);

/// Step-inversion model with no functional inverse (used to show the
/// bijectivity check rejects it).
FiducialModel discrete_step_model(int x2, int trials, double pi1_known);

/// Correlation mapping atanh(tau_hat) = atanh(tau) + gamma / sqrt(n (1+tau^2))
/// with the primary r.v. standard normal truncated to (-v, v). Throws if the
/// bijectivity condition fails at the given truncation.
FiducialModel tau_mapping(double tau_hat, int n, double v);

/// 0.99 times the largest truncation v <= 1000 admissible for the
/// correlation mapping, located by bisection to 1e-3 relative precision.
double select_truncation_v(int n, double tau_hat);

}  // namespace ioi::fiducial
