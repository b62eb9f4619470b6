#pragma once

#include <functional>

#include "ioi/common.hpp"
#include "ioi/density.hpp"
#include "ioi/distributions.hpp"

namespace ioi::bayes {

/// Conjugate update of an InvGamma(alpha0, beta0) variance prior with a
/// mean-centered sum of squares: InvGamma(alpha0 + n/2, beta0 + n*sigma_hat2/2).
Distribution variance_posterior(double alpha0, double beta0, int n, double sigma_hat2);

/// Normal posterior for a regression coefficient under a Normal(mu0,
/// sigma0_sq) prior: variance (sum_x_sq/sigma_sq + 1/sigma0_sq)^-1, mean
/// precision-weighted between the least-squares value and the prior mean.
Distribution regression_beta1_posterior(double mu0, double sigma0_sq, double sigma_sq,
                                        double sum_x_sq, double beta1_hat);

// Unnormalized log-densities shared by the gridded builders below and by
// per-sweep Metropolis updates (which never need the normalizer).

std::function<double(double)> mu_tprior_logdensity(double nu0, double mu0, double sigma0,
                                                   double xbar, int n, double sigma_sq);

struct TrinomialCounts {
  int x1, x2, x3;
  int total() const { return x1 + x2 + x3; }
};

std::function<double(double)> trinomial_pi1_logdensity(double alpha, double beta,
                                                       TrinomialCounts counts, double pi2);

enum class Axis { X, Y };

/// Centered cross moments of a bivariate sample at the current means.
struct BivariateMoments {
  int n;
  double sum_xx;  // sum of (x_i - mu_x)^2
  double sum_yy;  // sum of (y_i - mu_y)^2
  double sum_xy;  // sum of (x_i - mu_x)(y_i - mu_y)
};

std::function<double(double)> bivariate_variance_logdensity(Axis which, double alpha,
                                                            double beta,
                                                            const BivariateMoments& m,
                                                            double other_variance, double tau);

/// Posterior of the mean under a location-scale t prior and a normal
/// likelihood; Metropolis sampling tag (no conjugate form exists).
GriddedLogDensity mu_posterior_tprior(double nu0, double mu0, double sigma0, double xbar,
                                      int n, double sigma_sq);

/// Posterior of the first trinomial proportion given the second, under the
/// restricted beta-like prior; support [0, 1 - pi2].
GriddedLogDensity trinomial_pi1_posterior(double alpha, double beta, TrinomialCounts counts,
                                          double pi2);

/// Posterior of one bivariate-normal variance given everything else:
/// InvGamma(alpha, beta) prior times the correlated normal likelihood.
GriddedLogDensity bivariate_variance_posterior(Axis which, double alpha, double beta,
                                               const BivariateMoments& m,
                                               double other_variance, double tau);

}  // namespace ioi::bayes
