#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "ioi/common.hpp"
#include "ioi/density.hpp"
#include "ioi/distributions.hpp"

namespace ioi::bispatial {

/// Map from a one-sided P value to the post-data probability assigned to
/// the parameter-space hypothesis.
class PdoCurve {
 public:
  enum class Kind { PowerLaw, Table };

  static PdoCurve power_law(double exponent);  // kappa = p^exponent, exponent > 0
  /// Monotone (p, kappa) pairs, linearly interpolated; must reach (1, 1).
  static PdoCurve table(std::vector<std::pair<double, double>> points);

  double operator()(double p) const;
  Kind kind() const { return kind_; }
  double exponent() const { return exponent_; }
  const std::vector<std::pair<double, double>>& points() const { return points_; }

 private:
  PdoCurve() = default;
  Kind kind_ = Kind::PowerLaw;
  double exponent_ = 1.0;
  std::vector<std::pair<double, double>> points_;
};

/// Which hypothesis pair applies. Lower: the parameter-space hypothesis is
/// theta >= theta0 with p evaluated at the lower endpoint; Upper: theta <=
/// theta1 with p evaluated at the upper endpoint.
enum class Orientation { Lower, Upper };

/// Lower wins ties: an equal pair keeps the lower-endpoint hypothesis.
Orientation choose_orientation(double F_at_theta0, double Fprime_at_theta1);

/// One-sided tail probability of a normal test statistic. Callers pass the
/// already-shifted null value (e.g. the interval endpoint).
double one_sided_pvalue(double statistic, double null_value, double sd, Orientation side);

/// kappa per curve; p must lie in (0,1], p <= 0 is a degenerate P value.
double pdo_kappa(const PdoCurve& c, double p);

struct BispatialSpec {
  Interval interval;  // [theta0, theta1], positive width
  Distribution h;     // continuous unimodal on the interval, zero at its endpoints
  PdoCurve pdo;
  std::shared_ptr<const Density> f_s;  // neutral fiducial density, normalized
  Orientation orientation;

  BispatialSpec(Interval interval, Distribution h, PdoCurve pdo,
                std::shared_ptr<const Density> f_s, Orientation orientation);
};

/// Probability of the parameter-space hypothesis under the neutral density.
double neutral_probability(const BispatialSpec& spec);

/// Mass of h weighted by the neutral density over the interval.
double interval_mass(const BispatialSpec& spec);

/// The unique nu >= 0 with P(H_P) = kappa under the combined density:
/// continuity at the interval endpoints forces a single normalizer c across
/// both pieces; total mass one gives c = 1/(1 + nu*M_h); requiring
/// P(H_P) = kappa gives kappa = (A + nu*M_h)/(1 + nu*M_h), solved for nu.
/// Throws for kappa < A ("kappa below neutral fiducial probability") and
/// kappa >= 1.
double solve_nu(const BispatialSpec& spec, double kappa);

/// Piecewise density c*(1 + nu*h)*f_s on the interval, c*f_s outside.
class BDensity final : public Density {
 public:
  double logpdf(double theta) const override;
  double cdf(double theta) const override;
  Interval support() const override { return f_s_->support(); }

  double nu() const { return nu_; }
  double kappa() const { return kappa_; }
  double normalizer() const { return c_; }
  double hypothesis_probability() const;  // P(H_P), equals kappa by construction

 private:
  friend BDensity build_b_density(const BispatialSpec&, double, bool);
  BDensity(BispatialSpec spec, double nu, double kappa, double m_h, bool with_cdf_cache);

  BispatialSpec spec_;
  std::shared_ptr<const Density> f_s_;
  double nu_, kappa_, m_h_, c_;
  std::vector<double> cache_x_, cache_w_;  // cumulative nu*h*f_s over the interval
};

/// with_cdf_cache controls the eager cumulative-quadrature cache used by
/// cdf(); pass false in tight loops that only evaluate logpdf.
BDensity build_b_density(const BispatialSpec& spec, double kappa, bool with_cdf_cache = true);

}  // namespace ioi::bispatial
