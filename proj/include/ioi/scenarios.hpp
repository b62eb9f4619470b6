#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ioi/bayes.hpp"
#include "ioi/bispatial.hpp"
#include "ioi/common.hpp"
#include "ioi/gibbs.hpp"

namespace ioi::scenarios {

/// Closed-form or quadrature-backed density emitted next to chain output.
struct ReferenceCurve {
  std::string name;
  Interval range;
  std::function<double(double)> pdf;
};

struct RegressionData {
  std::vector<double> y, x1, x2, x3;
  int n() const { return static_cast<int>(y.size()); }
};

struct BivariateData {
  std::vector<double> x, y;
  int n() const { return static_cast<int>(x.size()); }
};

struct ScenarioSpec {
  std::string name;
  std::vector<gibbs::ConditionalSpec> conditionals;
  std::vector<double> initial;
  std::vector<ReferenceCurve> references;
  /// Ordered (key, value) defining parameters; the round-trip currency for
  /// configuration serialization.
  std::vector<std::pair<std::string, double>> params;
};

// Inference about a normal sample summarized by (n, xbar, s2).
ScenarioSpec student_fiducial(int n, double xbar, double s2);
ScenarioSpec student_bayes_sigma(int n, double xbar, double s2, double alpha0, double beta0);
ScenarioSpec student_bayes_mu(int n, double xbar, double s2, double nu0, double mu0,
                              double sigma0);
ScenarioSpec student_bispatial(int n, double xbar, double s2, double mu1, double eps,
                               bispatial::PdoCurve pdo, double alpha0, double beta0);

ScenarioSpec trinomial(bayes::TrinomialCounts counts, double alpha, double beta);

ScenarioSpec regression(const RegressionData& data, double mu0, double sigma0, double delta,
                        bispatial::PdoCurve pdo);
/// The compatible all-direct reference system for the same data (every
/// coefficient conditional normal, the variance conditional inverse gamma).
ScenarioSpec regression_all_fiducial(const RegressionData& data);

ScenarioSpec bivariate(const BivariateData& data, double alpha_x, double beta_x, double alpha_y,
                       double beta_y, double eps, bispatial::PdoCurve pdo);

/// Maximum-likelihood correlation given everything else: the real root in
/// (-1,1) of -n t^3 + sxy t^2 + (n - sxx - syy) t + sxy, where sxx, syy, sxy
/// are the centered sums scaled by the known variances. Among multiple roots
/// the log-likelihood maximizer wins; ties break toward the smallest |t|.
double tau_mle(int n, double sxx, double syy, double sxy);
double tau_mle(const BivariateData& data, double mu_x, double mu_y, double var_x, double var_y);

/// n (1 + tau^2) / (1 - tau^2)^2, |tau| < 1.
double fisher_information_tau(double tau, int n);

/// Density over tau implied by atanh(r) ~ Normal(atanh(tau), 1/(n-3)).
ReferenceCurve confidence_density_tau(double r, int n);
double confidence_cdf_tau(double r, int n, double t);

RegressionData generate_synthetic_regression(std::uint64_t seed,
                                             const std::array<double, 4>& beta, double sigma);
BivariateData generate_synthetic_bivariate(std::uint64_t seed, int n, double mu_x, double mu_y,
                                           double sd_x, double sd_y, double tau);

/// Least-squares summary of the regression design (normal equations).
struct RegressionLsSummary {
  std::array<double, 4> beta_hat;
  double ssr_min;
  std::array<double, 4> xtx_inv_diag;
};
RegressionLsSummary least_squares(const RegressionData& data);

/// Registry for the CLI: scenario by name with default (published) constants
/// overridable per key. Throws std::out_of_range for unknown names.
ScenarioSpec build_scenario(const std::string& name,
                            const std::map<std::string, double>& overrides = {});
std::vector<std::string> scenario_names();

}  // namespace ioi::scenarios
