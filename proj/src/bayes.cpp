#include "ioi/bayes.hpp"

#include <algorithm>
#include <cmath>

namespace ioi::bayes {

Distribution variance_posterior(double alpha0, double beta0, int n, double sigma_hat2) {
  require(alpha0 > 0.0 && beta0 > 0.0, "variance_posterior: prior constants must be positive");
  require(n >= 0, "variance_posterior: n must be non-negative");
  require(n == 0 || sigma_hat2 > 0.0, "variance_posterior: sigma_hat2 must be positive");
  return InvGamma(alpha0 + 0.5 * n, beta0 + 0.5 * n * (n == 0 ? 0.0 : sigma_hat2));
}

Distribution regression_beta1_posterior(double mu0, double sigma0_sq, double sigma_sq,
                                        double sum_x_sq, double beta1_hat) {
  require(std::isfinite(mu0) && std::isfinite(beta1_hat), "regression_beta1_posterior: bad inputs");
  require(sigma0_sq > 0.0 && sigma_sq > 0.0,
          "regression_beta1_posterior: variances must be positive");
  require(sum_x_sq > 0.0, "regression_beta1_posterior: degenerate design (sum of squares is 0)");
  const double precision = sum_x_sq / sigma_sq + 1.0 / sigma0_sq;
  const double var = 1.0 / precision;
  const double mean = var * (beta1_hat * sum_x_sq / sigma_sq + mu0 / sigma0_sq);
  return Normal(mean, var);
}

std::function<double(double)> mu_tprior_logdensity(double nu0, double mu0, double sigma0,
                                                   double xbar, int n, double sigma_sq) {
  require(nu0 > 0.0 && sigma0 > 0.0, "mu_tprior_logdensity: prior constants must be positive");
  require(n >= 0, "mu_tprior_logdensity: n must be non-negative");
  require(n == 0 || sigma_sq > 0.0, "mu_tprior_logdensity: sigma_sq must be positive");
  return [=](double mu) {
    const double z = mu - mu0;
    double out = -0.5 * (nu0 + 1.0) * std::log1p(z * z / (sigma0 * sigma0 * nu0));
    if (n > 0) {
      const double r = xbar - mu;
      out -= n * r * r / (2.0 * sigma_sq);
    }
    return out;
  };
}

std::function<double(double)> trinomial_pi1_logdensity(double alpha, double beta,
                                                       TrinomialCounts counts, double pi2) {
  require(alpha > 0.0 && beta > 0.0, "trinomial_pi1_logdensity: prior constants must be positive");
  require(counts.x1 >= 0 && counts.x2 >= 0 && counts.x3 >= 0,
          "trinomial_pi1_logdensity: counts must be non-negative");
  require(pi2 >= 0.0 && pi2 < 1.0, "trinomial_pi1_logdensity: pi2 must lie in [0,1)");
  const int n = counts.total();
  const double e1 = alpha + counts.x1 - 1.0;
  const double e2 = static_cast<double>(n - counts.x1 - counts.x2);
  const double e3 = beta - 1.0;
  const double budget = 1.0 - pi2;
  return [=](double pi1) {
    if (pi1 < 0.0 || pi1 > budget) return -kInf;
    double out = 0.0;
    if (e1 != 0.0) out += e1 * std::log(pi1);
    if (e2 != 0.0) out += e2 * std::log(budget - pi1);
    if (e3 != 0.0) out += e3 * std::log1p(-pi1);
    return out;
  };
}

std::function<double(double)> bivariate_variance_logdensity(Axis which, double alpha,
                                                            double beta,
                                                            const BivariateMoments& m,
                                                            double other_variance, double tau) {
  require(alpha > 0.0 && beta > 0.0, "bivariate_variance_logdensity: prior constants positive");
  require(m.n >= 1, "bivariate_variance_logdensity: need data");
  require(other_variance > 0.0, "bivariate_variance_logdensity: other variance positive");
  require(tau * tau < 1.0, "bivariate_variance_logdensity: |tau| must be below 1");
  const double own_sq = which == Axis::X ? m.sum_xx : m.sum_yy;
  const double cross = m.sum_xy;
  const double other_sd = std::sqrt(other_variance);
  const double one_minus = 1.0 - tau * tau;
  const int n = m.n;
  return [=](double variance) {
    if (variance <= 0.0) return -kInf;
    const double sd = std::sqrt(variance);
    // InvGamma(alpha, beta) prior on the variance.
    double out = -(alpha + 1.0) * std::log(variance) - beta / variance;
    // Correlated-normal likelihood in this variance.
    out += -n * std::log(sd) - own_sq / (2.0 * one_minus * variance) +
           tau * cross / (one_minus * sd * other_sd);
    return out;
  };
}

namespace {

// Widen a starting interval until the log-density at both ends is
// negligible next to its interior peak (or a hard bound is reached).
Interval expand_support(const std::function<double(double)>& raw, Interval start,
                        Interval hard, bool multiplicative) {
  double peak = -kInf;
  for (int i = 1; i < 64; ++i) {
    peak = std::max(peak, raw(start.lo + (start.hi - start.lo) * i / 64.0));
  }
  const double floor_log = peak - 30.0;  // exp(-30) ~ 1e-13 relative
  Interval out = start;
  for (int it = 0; it < 200 && out.lo > hard.lo && raw(out.lo) > floor_log; ++it) {
    out.lo = multiplicative ? out.lo * 0.5 : out.lo - 0.5 * (out.hi - out.lo);
    out.lo = std::max(out.lo, hard.lo);
  }
  for (int it = 0; it < 200 && out.hi < hard.hi && raw(out.hi) > floor_log; ++it) {
    out.hi = multiplicative ? out.hi * 2.0 : out.hi + 0.5 * (out.hi - out.lo);
    out.hi = std::min(out.hi, hard.hi);
  }
  return out;
}

}  // namespace

GriddedLogDensity mu_posterior_tprior(double nu0, double mu0, double sigma0, double xbar,
                                      int n, double sigma_sq) {
  auto raw = mu_tprior_logdensity(nu0, mu0, sigma0, xbar, n, sigma_sq);
  // Envelope: with data, start from the likelihood's quantile box (the
  // narrower factor) and let the expansion pass absorb the prior pull;
  // starting from the prior box instead would hide a narrow likelihood
  // bump from the grid when the prior is much wider.
  Interval box;
  if (n > 0) {
    const Distribution lik = Normal(xbar, sigma_sq / n);
    box = Interval{quantile(lik, 1e-6), quantile(lik, 1.0 - 1e-6)};
  } else {
    const Distribution prior = NonStdT(nu0, mu0, sigma0);
    box = Interval{quantile(prior, 1e-6), quantile(prior, 1.0 - 1e-6)};
  }
  const Interval sup = expand_support(raw, box, real_line(), false);
  return GriddedLogDensity(raw, sup, SamplerKind::Metropolis);
}

GriddedLogDensity trinomial_pi1_posterior(double alpha, double beta, TrinomialCounts counts,
                                          double pi2) {
  auto raw = trinomial_pi1_logdensity(alpha, beta, counts, pi2);
  return GriddedLogDensity(raw, Interval{0.0, 1.0 - pi2}, SamplerKind::Metropolis);
}

GriddedLogDensity bivariate_variance_posterior(Axis which, double alpha, double beta,
                                               const BivariateMoments& m,
                                               double other_variance, double tau) {
  auto raw = bivariate_variance_logdensity(which, alpha, beta, m, other_variance, tau);
  const double own_sq = which == Axis::X ? m.sum_xx : m.sum_yy;
  // Envelope: the tau = 0 conjugate posterior; the cross term then shifts
  // mass, which the expansion pass absorbs.
  const Distribution envelope = InvGamma(alpha + 0.5 * m.n, beta + 0.5 * own_sq);
  const Interval box{quantile(envelope, 1e-6), quantile(envelope, 1.0 - 1e-6)};
  const Interval sup = expand_support(raw, box, positive_half_line(), true);
  return GriddedLogDensity(raw, sup, SamplerKind::Metropolis);
}

}  // namespace ioi::bayes
