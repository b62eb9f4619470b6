#include "ioi/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "ioi/density.hpp"
#include "ioi/fiducial.hpp"
#include "ioi/quadrature.hpp"

namespace ioi::scenarios {

using bayes::TrinomialCounts;
using bispatial::BispatialSpec;
using bispatial::Orientation;
using bispatial::PdoCurve;
using gibbs::ConditionalDensity;
using gibbs::ConditionalSpec;
using gibbs::UpdateKind;

namespace {

// Mean-centered sum of squares (1/n)*sum (x_i - mu)^2 from the summary
// (n, xbar, s2), recomputed each sweep from the current mu.
double sigma_hat_sq(int n, double xbar, double s2, double mu) {
  return ((n - 1) * s2 + n * (xbar - mu) * (xbar - mu)) / n;
}

ConditionalDensity direct_density(Distribution d) {
  ConditionalDensity cd;
  cd.logpdf = [d](double x) { return logpdf(d, x); };
  cd.direct_sampler = [d](RandomStream& rng) { return sample(d, rng); };
  return cd;
}

ReferenceCurve curve_from(std::string name, Distribution d) {
  const Interval range{quantile(d, 1e-4), quantile(d, 1.0 - 1e-4)};
  return ReferenceCurve{std::move(name), range,
                        [d](double x) { return pdf(d, x); }};
}

// Density of the standard deviation implied by a variance marginal:
// 2*s*pdf(variance, s^2).
ReferenceCurve sd_curve_from(std::string name, Distribution variance_marginal) {
  const Interval range{std::sqrt(quantile(variance_marginal, 1e-4)),
                       std::sqrt(quantile(variance_marginal, 1.0 - 1e-4))};
  return ReferenceCurve{std::move(name), range, [variance_marginal](double s) {
                          return s <= 0.0 ? 0.0 : 2.0 * s * pdf(variance_marginal, s * s);
                        }};
}

void validate_names(const ScenarioSpec& spec) {
  for (std::size_t i = 0; i < spec.conditionals.size(); ++i) {
    for (std::size_t j = i + 1; j < spec.conditionals.size(); ++j) {
      require(spec.conditionals[i].name != spec.conditionals[j].name,
              "ScenarioSpec: duplicate parameter name");
    }
  }
  require(spec.initial.size() == spec.conditionals.size(),
          "ScenarioSpec: initial values must cover every parameter");
}

}  // namespace

// ---------------------------------------------------------------------------
// Normal-sample scenarios

ScenarioSpec student_fiducial(int n, double xbar, double s2) {
  require(n >= 2, "student_fiducial: n must be >= 2");
  require(s2 > 0.0, "student_fiducial: s2 must be positive");
  ScenarioSpec spec;
  spec.name = "student_fiducial";
  spec.params = {{"n", double(n)}, {"xbar", xbar}, {"s2", s2}};

  ConditionalSpec mu;
  mu.name = "mu";
  mu.builder = [n, xbar](const std::vector<double>& v) {
    return direct_density(fiducial::normal_mean_conditional(xbar, v[1], n));
  };

  ConditionalSpec var;
  var.name = "sigma2";
  var.builder = [n, xbar, s2](const std::vector<double>& v) {
    return direct_density(fiducial::variance_conditional(sigma_hat_sq(n, xbar, s2, v[0]), n));
  };

  spec.conditionals = {mu, var};
  spec.initial = {xbar, s2};
  spec.references = {
      curve_from("mu_marginal", NonStdT(n - 1.0, xbar, std::sqrt(s2 / n))),
      curve_from("sigma2_marginal", InvGamma(0.5 * (n - 1), 0.5 * (n - 1) * s2)),
      sd_curve_from("sigma_marginal", InvGamma(0.5 * (n - 1), 0.5 * (n - 1) * s2)),
  };
  validate_names(spec);
  return spec;
}

ScenarioSpec student_bayes_sigma(int n, double xbar, double s2, double alpha0, double beta0) {
  require(n >= 2 && s2 > 0.0, "student_bayes_sigma: bad data summary");
  require(alpha0 > 0.0 && beta0 > 0.0, "student_bayes_sigma: prior constants positive");
  ScenarioSpec spec;
  spec.name = "student_bayes_sigma";
  spec.params = {
      {"n", double(n)}, {"xbar", xbar}, {"s2", s2}, {"alpha0", alpha0}, {"beta0", beta0}};

  ConditionalSpec mu;
  mu.name = "mu";
  mu.builder = [n, xbar](const std::vector<double>& v) {
    return direct_density(fiducial::normal_mean_conditional(xbar, v[1], n));
  };

  ConditionalSpec var;
  var.name = "sigma2";
  var.builder = [n, xbar, s2, alpha0, beta0](const std::vector<double>& v) {
    return direct_density(
        bayes::variance_posterior(alpha0, beta0, n, sigma_hat_sq(n, xbar, s2, v[0])));
  };

  spec.conditionals = {mu, var};
  spec.initial = {xbar, s2};
  const double df = 2.0 * alpha0 + n - 1.0;
  spec.references = {
      curve_from("mu_marginal",
                 NonStdT(df, xbar, std::sqrt((2.0 * beta0 + (n - 1) * s2) / (df * n)))),
      curve_from("sigma2_marginal", InvGamma(alpha0 + 0.5 * (n - 1), beta0 + 0.5 * (n - 1) * s2)),
      curve_from("sigma2_prior", InvGamma(alpha0, beta0)),
      sd_curve_from("sigma_marginal", InvGamma(alpha0 + 0.5 * (n - 1), beta0 + 0.5 * (n - 1) * s2)),
  };
  validate_names(spec);
  return spec;
}

ScenarioSpec student_bayes_mu(int n, double xbar, double s2, double nu0, double mu0,
                              double sigma0) {
  require(n >= 2 && s2 > 0.0, "student_bayes_mu: bad data summary");
  ScenarioSpec spec;
  spec.name = "student_bayes_mu";
  spec.params = {{"n", double(n)}, {"xbar", xbar},   {"s2", s2},
                 {"nu0", nu0},     {"mu0", mu0},     {"sigma0", sigma0}};

  ConditionalSpec mu;
  mu.name = "mu";
  mu.update = UpdateKind::Metropolis;
  mu.metropolis_scale = 2.4 * std::sqrt(s2 / n);
  mu.builder = [n, xbar, nu0, mu0, sigma0](const std::vector<double>& v) {
    ConditionalDensity cd;
    cd.logpdf = bayes::mu_tprior_logdensity(nu0, mu0, sigma0, xbar, n, v[1]);
    return cd;
  };

  ConditionalSpec var;
  var.name = "sigma2";
  var.builder = [n, xbar, s2](const std::vector<double>& v) {
    return direct_density(fiducial::variance_conditional(sigma_hat_sq(n, xbar, s2, v[0]), n));
  };

  spec.conditionals = {mu, var};
  spec.initial = {xbar, s2};

  // Joint form: (1/s^2)^(n/2+1) * prior(mu) * exp(-n*sighat^2(mu)/(2 s^2)).
  // The mu marginal integrates the variance out in closed form; the variance
  // marginal integrates mu out by quadrature.
  auto log_prior = [nu0, mu0, sigma0](double m) {
    const double z = m - mu0;
    return -0.5 * (nu0 + 1.0) * std::log1p(z * z / (sigma0 * sigma0 * nu0));
  };
  auto mu_marg_raw = [n, xbar, s2, log_prior](double m) {
    return log_prior(m) - 0.5 * n * std::log(n * sigma_hat_sq(n, xbar, s2, m));
  };
  const auto mu_marg = std::make_shared<GriddedLogDensity>(
      mu_marg_raw, Interval{xbar - 12.0 * std::sqrt(s2 / n), xbar + 12.0 * std::sqrt(s2 / n)},
      SamplerKind::Metropolis);
  auto var_marg_raw = [n, xbar, s2, log_prior](double var) {
    if (var <= 0.0) return -kInf;
    auto integrand = [&](double m) {
      return std::exp(log_prior(m) - n * (xbar - m) * (xbar - m) / (2.0 * var));
    };
    const double span = 10.0 * std::sqrt(var / n) + 5.0;
    const double inner = adaptive_trapezoid(integrand, xbar - span, xbar + span, 1e-12, 1e-9);
    return -(0.5 * n + 1.0) * std::log(var) - (n - 1) * s2 / (2.0 * var) + std::log(inner);
  };
  const Distribution var_envelope = InvGamma(0.5 * (n - 1), 0.5 * (n - 1) * s2);
  const auto var_marg = std::make_shared<GriddedLogDensity>(
      var_marg_raw,
      Interval{0.5 * quantile(var_envelope, 1e-5), 2.0 * quantile(var_envelope, 1.0 - 1e-5)},
      SamplerKind::Metropolis, std::vector<double>{}, 512);

  const Interval var_view{quantile(var_envelope, 1e-4), quantile(var_envelope, 1.0 - 1e-4)};
  spec.references = {
      ReferenceCurve{"mu_marginal", mu_marg->support(),
                     [mu_marg](double x) { return mu_marg->pdf(x); }},
      ReferenceCurve{"sigma2_marginal", var_view,
                     [var_marg](double x) { return var_marg->pdf(x); }},
      curve_from("mu_prior", NonStdT(nu0, mu0, sigma0)),
  };
  validate_names(spec);
  return spec;
}

ScenarioSpec student_bispatial(int n, double xbar, double s2, double mu1, double eps,
                               PdoCurve pdo, double alpha0, double beta0) {
  require(n >= 2 && s2 > 0.0, "student_bispatial: bad data summary");
  require(eps > 0.0, "student_bispatial: eps must be positive (point-mass case unsupported)");
  ScenarioSpec spec;
  spec.name = "student_bispatial";
  spec.params = {{"n", double(n)}, {"xbar", xbar},     {"s2", s2},
                 {"mu1", mu1},     {"eps", eps},       {"pdo_exponent", pdo.exponent()},
                 {"alpha0", alpha0}, {"beta0", beta0}};
  require(pdo.kind() == PdoCurve::Kind::PowerLaw,
          "student_bispatial: configuration supports power-law curves");

  const Interval interval{mu1 - eps, mu1 + eps};
  const Distribution h = ScaledBeta(4.0, 4.0, interval.lo, interval.hi);

  ConditionalSpec mu;
  mu.name = "mu";
  mu.update = UpdateKind::Metropolis;
  mu.metropolis_scale = 2.4 * std::sqrt(s2 / n);
  mu.builder = [n, xbar, mu1, eps, pdo, interval, h](const std::vector<double>& v) {
    const double se = std::sqrt(v[1] / n);
    const double f_lo = normal_cdf((xbar - (mu1 - eps)) / se);
    const double fp_hi = 1.0 - normal_cdf((xbar - (mu1 + eps)) / se);
    const Orientation side = bispatial::choose_orientation(f_lo, fp_hi);
    const double p = side == Orientation::Lower ? f_lo : fp_hi;
    const double kappa = bispatial::pdo_kappa(pdo, p);
    BispatialSpec bs(interval, h, pdo,
                     std::make_shared<DistributionDensity>(Normal(xbar, v[1] / n)), side);
    auto b = std::make_shared<bispatial::BDensity>(
        bispatial::build_b_density(bs, kappa, /*with_cdf_cache=*/false));
    ConditionalDensity cd;
    cd.logpdf = [b](double x) { return b->logpdf(x); };
    return cd;
  };

  ConditionalSpec var;
  var.name = "sigma2";
  var.builder = [n, xbar, s2, alpha0, beta0](const std::vector<double>& v) {
    return direct_density(
        bayes::variance_posterior(alpha0, beta0, n, sigma_hat_sq(n, xbar, s2, v[0])));
  };

  spec.conditionals = {mu, var};
  spec.initial = {xbar, s2};
  const double df = 2.0 * alpha0 + n - 1.0;
  spec.references = {
      curve_from("mu_flat_marginal", NonStdT(n - 1.0, xbar, std::sqrt(s2 / n))),
      curve_from("mu_informed_marginal",
                 NonStdT(df, xbar, std::sqrt((2.0 * beta0 + (n - 1) * s2) / (df * n)))),
      curve_from("sigma2_flat_marginal", InvGamma(0.5 * (n - 1), 0.5 * (n - 1) * s2)),
      curve_from("sigma2_informed_marginal",
                 InvGamma(alpha0 + 0.5 * (n - 1), beta0 + 0.5 * (n - 1) * s2)),
      curve_from("sigma2_prior", InvGamma(alpha0, beta0)),
      sd_curve_from("sigma_marginal", InvGamma(alpha0 + 0.5 * (n - 1), beta0 + 0.5 * (n - 1) * s2)),
  };
  validate_names(spec);
  return spec;
}

// ---------------------------------------------------------------------------
// Trinomial scenario

ScenarioSpec trinomial(TrinomialCounts counts, double alpha, double beta) {
  require(counts.x1 >= 0 && counts.x2 >= 0 && counts.x3 >= 0, "trinomial: negative counts");
  require(counts.total() > 0, "trinomial: all counts are zero");
  require(counts.x2 + counts.x3 > 0, "trinomial: no trials for the second proportion");
  ScenarioSpec spec;
  spec.name = "trinomial";
  spec.params = {{"x1", double(counts.x1)}, {"x2", double(counts.x2)},
                 {"x3", double(counts.x3)}, {"alpha", alpha},
                 {"beta", beta}};

  const int n = counts.total();
  const int trials = counts.x2 + counts.x3;

  ConditionalSpec pi1;
  pi1.name = "pi1";
  pi1.update = UpdateKind::Metropolis;
  pi1.metropolis_scale = 0.1;
  pi1.builder = [alpha, beta, counts](const std::vector<double>& v) {
    ConditionalDensity cd;
    cd.logpdf = bayes::trinomial_pi1_logdensity(alpha, beta, counts, v[1]);
    return cd;
  };

  // The step-inversion density scales linearly with the free budget
  // 1 - pi1, so one unit-interval grid serves every sweep.
  const auto base = std::make_shared<GriddedLogDensity>(fiducial::discrete_fiducial_stepinv(
      counts.x2, trials, 0.0, fiducial::GpdFunction::constant(1.0)));
  ConditionalSpec pi2;
  pi2.name = "pi2";
  pi2.builder = [base](const std::vector<double>& v) {
    const double budget = 1.0 - v[0];
    ConditionalDensity cd;
    cd.logpdf = [base, budget](double x) {
      if (x < 0.0 || x > budget) return -kInf;
      return base->logpdf(x / budget) - std::log(budget);
    };
    cd.direct_sampler = [base, budget](RandomStream& rng) { return budget * base->sample(rng); };
    return cd;
  };

  spec.conditionals = {pi1, pi2};
  spec.initial = {double(counts.x1) / n, double(counts.x2) / n};

  // Overlay curves: the unrestricted prior for pi1 and the two marginals of
  // the square-root-weighted joint over the simplex, by quadrature.
  auto joint_marginal = [counts](bool first) {
    auto raw = [counts, first](double p) {
      if (p <= 0.0 || p >= 1.0) return -kInf;
      const double a = first ? counts.x1 - 0.5 : counts.x2 - 0.5;
      auto inner = [&](double q) {
        const double rest = 1.0 - p - q;
        if (q <= 0.0 || rest <= 0.0) return 0.0;
        const double b = first ? counts.x2 - 0.5 : counts.x1 - 0.5;
        return std::pow(q, b) * std::pow(rest, counts.x3 - 0.5);
      };
      const double inner_mass = adaptive_trapezoid(inner, 0.0, 1.0 - p, 1e-13, 1e-10);
      if (inner_mass <= 0.0) return -kInf;
      return a * std::log(p) + std::log(inner_mass);
    };
    return std::make_shared<GriddedLogDensity>(raw, Interval{0.0, 1.0}, SamplerKind::Metropolis,
                                               std::vector<double>{}, 512);
  };
  const auto m1 = joint_marginal(true);
  const auto m2 = joint_marginal(false);
  spec.references = {
      curve_from("pi1_prior", ScaledBeta(alpha, beta, 0.0, 1.0)),
      ReferenceCurve{"pi1_root_weighted_marginal", Interval{0.0, 1.0},
                     [m1](double x) { return m1->pdf(x); }},
      ReferenceCurve{"pi2_root_weighted_marginal", Interval{0.0, 1.0},
                     [m2](double x) { return m2->pdf(x); }},
  };
  validate_names(spec);
  return spec;
}

// ---------------------------------------------------------------------------
// Regression scenario

namespace {

struct RegressionSums {
  int n;
  double sy, sx1, sx2, sx3;
  double sx1y, sx2y, sx3y;
  double sx11, sx22, sx33, sx12, sx13, sx23;
};

RegressionSums regression_sums(const RegressionData& d) {
  RegressionSums s{};
  s.n = d.n();
  for (int i = 0; i < s.n; ++i) {
    const double y = d.y[i], a = d.x1[i], b = d.x2[i], c = d.x3[i];
    s.sy += y;
    s.sx1 += a;
    s.sx2 += b;
    s.sx3 += c;
    s.sx1y += a * y;
    s.sx2y += b * y;
    s.sx3y += c * y;
    s.sx11 += a * a;
    s.sx22 += b * b;
    s.sx33 += c * c;
    s.sx12 += a * b;
    s.sx13 += a * c;
    s.sx23 += b * c;
  }
  return s;
}

double residual_ss(const RegressionData& d, const std::vector<double>& v) {
  double ss = 0.0;
  for (int i = 0; i < d.n(); ++i) {
    const double r = d.y[i] - v[0] - v[1] * d.x1[i] - v[2] * d.x2[i] - v[3] * d.x3[i];
    ss += r * r;
  }
  return ss;
}

}  // namespace

RegressionLsSummary least_squares(const RegressionData& data) {
  const RegressionSums s = regression_sums(data);
  // Normal equations for (1, x1, x2, x3), solved by Gaussian elimination
  // with partial pivoting; the inverse diagonal comes from solving against
  // the identity columns.
  double a[4][4] = {{double(s.n), s.sx1, s.sx2, s.sx3},
                    {s.sx1, s.sx11, s.sx12, s.sx13},
                    {s.sx2, s.sx12, s.sx22, s.sx23},
                    {s.sx3, s.sx13, s.sx23, s.sx33}};
  double rhs[4][5] = {};  // [ X'y | I ]
  rhs[0][0] = s.sy;
  rhs[1][0] = s.sx1y;
  rhs[2][0] = s.sx2y;
  rhs[3][0] = s.sx3y;
  for (int i = 0; i < 4; ++i) rhs[i][i + 1] = 1.0;

  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    }
    require(std::fabs(a[pivot][col]) > 1e-12, "least_squares: singular design");
    std::swap(a[col], a[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (int c = 0; c < 4; ++c) a[r][c] -= f * a[col][c];
      for (int c = 0; c < 5; ++c) rhs[r][c] -= f * rhs[col][c];
    }
  }
  RegressionLsSummary out{};
  for (int i = 0; i < 4; ++i) {
    out.beta_hat[i] = rhs[i][0] / a[i][i];
    out.xtx_inv_diag[i] = rhs[i][i + 1] / a[i][i];
  }
  out.ssr_min = residual_ss(data, {out.beta_hat[0], out.beta_hat[1], out.beta_hat[2],
                                   out.beta_hat[3], 0.0});
  return out;
}

namespace {

std::vector<ReferenceCurve> regression_reference_curves(const RegressionData& data) {
  const RegressionLsSummary ls = least_squares(data);
  const int n = data.n();
  const double df = n - 4.0;
  const double s2 = ls.ssr_min / df;
  std::vector<ReferenceCurve> out;
  const char* names[4] = {"beta0_marginal", "beta1_marginal", "beta2_marginal",
                          "beta3_marginal"};
  for (int j = 0; j < 4; ++j) {
    out.push_back(curve_from(
        names[j], NonStdT(df, ls.beta_hat[j], std::sqrt(s2 * ls.xtx_inv_diag[j]))));
  }
  out.push_back(curve_from("sigma2_marginal", InvGamma(0.5 * df, 0.5 * ls.ssr_min)));
  return out;
}

ConditionalSpec regression_beta0_conditional(const RegressionData& data) {
  const RegressionSums s = regression_sums(data);
  ConditionalSpec c;
  c.name = "beta0";
  c.builder = [s](const std::vector<double>& v) {
    const double m = (s.sy - v[1] * s.sx1 - v[2] * s.sx2 - v[3] * s.sx3) / s.n;
    return direct_density(Normal(m, v[4] / s.n));
  };
  return c;
}

ConditionalSpec regression_beta2_conditional(const RegressionData& data) {
  const RegressionSums s = regression_sums(data);
  ConditionalSpec c;
  c.name = "beta2";
  c.builder = [s](const std::vector<double>& v) {
    const double m = (s.sx2y - v[0] * s.sx2 - v[1] * s.sx12 - v[3] * s.sx23) / s.sx22;
    return direct_density(Normal(m, v[4] / s.sx22));
  };
  return c;
}

ConditionalSpec regression_sigma_conditional(const RegressionData& data) {
  ConditionalSpec c;
  c.name = "sigma2";
  c.builder = [data](const std::vector<double>& v) {
    return direct_density(InvGamma(0.5 * data.n(), 0.5 * residual_ss(data, v)));
  };
  return c;
}

double regression_beta1_hat(const RegressionSums& s, const std::vector<double>& v) {
  return (s.sx1y - v[0] * s.sx1 - v[2] * s.sx12 - v[3] * s.sx13) / s.sx11;
}

double regression_beta3_hat(const RegressionSums& s, const std::vector<double>& v) {
  return (s.sx3y - v[0] * s.sx3 - v[1] * s.sx13 - v[2] * s.sx23) / s.sx33;
}

}  // namespace

ScenarioSpec regression(const RegressionData& data, double mu0, double sigma0, double delta,
                        PdoCurve pdo) {
  const RegressionSums s = regression_sums(data);
  require(s.n >= 6, "regression: need at least six observations");
  require(s.sx11 > 0.0 && s.sx22 > 0.0 && s.sx33 > 0.0, "regression: degenerate design");
  require(delta > 0.0, "regression: delta must be positive (point-mass case unsupported)");
  require(sigma0 > 0.0, "regression: sigma0 must be positive");
  require(pdo.kind() == PdoCurve::Kind::PowerLaw,
          "regression: configuration supports power-law curves");

  ScenarioSpec spec;
  spec.name = "regression";
  spec.params = {{"mu0", mu0}, {"sigma0", sigma0}, {"delta", delta},
                 {"pdo_exponent", pdo.exponent()}};

  ConditionalSpec beta1;
  beta1.name = "beta1";
  beta1.builder = [s, mu0, sigma0](const std::vector<double>& v) {
    return direct_density(bayes::regression_beta1_posterior(
        mu0, sigma0 * sigma0, v[4], s.sx11, regression_beta1_hat(s, v)));
  };

  const Interval interval{-delta, delta};
  const Distribution h = ScaledBeta(4.0, 4.0, -delta, delta);
  ConditionalSpec beta3;
  beta3.name = "beta3";
  beta3.update = UpdateKind::Metropolis;
  beta3.metropolis_scale = 0.5;
  beta3.builder = [s, delta, pdo, interval, h](const std::vector<double>& v) {
    const double bhat = regression_beta3_hat(s, v);
    const double se = std::sqrt(v[4] / s.sx33);
    const double f_lo = normal_cdf((bhat + delta) / se);
    const double fp_hi = 1.0 - normal_cdf((bhat - delta) / se);
    const Orientation side = bispatial::choose_orientation(f_lo, fp_hi);
    const double kappa = bispatial::pdo_kappa(pdo, side == Orientation::Lower ? f_lo : fp_hi);
    BispatialSpec bs(interval, h, pdo,
                     std::make_shared<DistributionDensity>(Normal(bhat, v[4] / s.sx33)), side);
    auto b = std::make_shared<bispatial::BDensity>(
        bispatial::build_b_density(bs, kappa, /*with_cdf_cache=*/false));
    ConditionalDensity cd;
    cd.logpdf = [b](double x) { return b->logpdf(x); };
    return cd;
  };

  spec.conditionals = {regression_beta0_conditional(data), beta1,
                       regression_beta2_conditional(data), beta3,
                       regression_sigma_conditional(data)};
  const double ybar = s.sy / s.n;
  double vary = 0.0;
  for (double y : data.y) vary += (y - ybar) * (y - ybar);
  vary /= s.n;
  spec.initial = {ybar, mu0, 0.0, 0.0, vary};
  spec.references = regression_reference_curves(data);
  spec.references.push_back(curve_from("beta1_prior", Normal(mu0, sigma0 * sigma0)));
  validate_names(spec);
  return spec;
}

ScenarioSpec regression_all_fiducial(const RegressionData& data) {
  const RegressionSums s = regression_sums(data);
  require(s.sx11 > 0.0 && s.sx22 > 0.0 && s.sx33 > 0.0, "regression: degenerate design");

  ScenarioSpec spec;
  spec.name = "regression_all_fiducial";
  spec.params = {};

  ConditionalSpec beta1;
  beta1.name = "beta1";
  beta1.builder = [s](const std::vector<double>& v) {
    return direct_density(Normal(regression_beta1_hat(s, v), v[4] / s.sx11));
  };
  ConditionalSpec beta3;
  beta3.name = "beta3";
  beta3.builder = [s](const std::vector<double>& v) {
    return direct_density(Normal(regression_beta3_hat(s, v), v[4] / s.sx33));
  };

  spec.conditionals = {regression_beta0_conditional(data), beta1,
                       regression_beta2_conditional(data), beta3,
                       regression_sigma_conditional(data)};
  const RegressionLsSummary ls = least_squares(data);
  spec.initial = {ls.beta_hat[0], ls.beta_hat[1], ls.beta_hat[2], ls.beta_hat[3],
                  ls.ssr_min / (s.n - 4.0)};
  spec.references = regression_reference_curves(data);
  validate_names(spec);
  return spec;
}

// ---------------------------------------------------------------------------
// Bivariate-normal scenario

double fisher_information_tau(double tau, int n) {
  require(std::fabs(tau) < 1.0, "fisher_information_tau: |tau| must be below 1");
  const double d = 1.0 - tau * tau;
  return n * (1.0 + tau * tau) / (d * d);
}

double tau_mle(int n, double sxx, double syy, double sxy) {
  require(n >= 1, "tau_mle: need data");
  auto cubic = [&](double t) {
    return -n * t * t * t + sxy * t * t + (n - sxx - syy) * t + sxy;
  };
  auto loglik = [&](double t) {
    const double d = 1.0 - t * t;
    return -0.5 * n * std::log(d) - (sxx - 2.0 * t * sxy + syy) / (2.0 * d);
  };
  // Root isolation on a grid, bisection, then Newton polish.
  std::vector<double> roots;
  const int grid = 400;
  double prev_t = -1.0 + 1e-12;
  double prev_f = cubic(prev_t);
  for (int i = 1; i <= grid; ++i) {
    const double t = -1.0 + 2.0 * i / grid - (i == grid ? 1e-12 : 0.0);
    const double f = cubic(t);
    if (prev_f == 0.0) roots.push_back(prev_t);
    if ((prev_f < 0.0) != (f < 0.0)) {
      double lo = prev_t, hi = t;
      double flo = prev_f;
      for (int it = 0; it < 100 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = cubic(mid);
        if ((flo < 0.0) == (fm < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      double r = 0.5 * (lo + hi);
      for (int it = 0; it < 4; ++it) {  // Newton polish
        const double f0 = cubic(r);
        const double d0 = -3.0 * n * r * r + 2.0 * sxy * r + (n - sxx - syy);
        if (d0 == 0.0) break;
        const double next = r - f0 / d0;
        if (std::fabs(next) < 1.0) r = next;
      }
      roots.push_back(r);
    }
    prev_t = t;
    prev_f = f;
  }
  require(!roots.empty(), "tau_mle: no root inside (-1,1)");
  double best = roots.front();
  for (double r : roots) {
    const double lr = loglik(r), lb = loglik(best);
    if (lr > lb || (lr == lb && std::fabs(r) < std::fabs(best))) best = r;
  }
  return best;
}

double tau_mle(const BivariateData& data, double mu_x, double mu_y, double var_x,
               double var_y) {
  require(var_x > 0.0 && var_y > 0.0, "tau_mle: variances must be positive");
  const int n = data.n();
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dx = data.x[i] - mu_x;
    const double dy = data.y[i] - mu_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  return tau_mle(n, sxx / var_x, syy / var_y, sxy / std::sqrt(var_x * var_y));
}

double confidence_cdf_tau(double r, int n, double t) {
  require(n > 3, "confidence_cdf_tau: n must exceed 3");
  require(std::fabs(r) < 1.0, "confidence_cdf_tau: |r| must be below 1");
  if (t <= -1.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return normal_cdf((std::atanh(t) - std::atanh(r)) * std::sqrt(n - 3.0));
}

ReferenceCurve confidence_density_tau(double r, int n) {
  require(n > 3, "confidence_density_tau: n must exceed 3");
  require(std::fabs(r) < 1.0, "confidence_density_tau: |r| must be below 1");
  const double root = std::sqrt(n - 3.0);
  const double zr = std::atanh(r);
  return ReferenceCurve{
      "tau_confidence", Interval{-1.0, 1.0}, [root, zr](double t) {
        if (t <= -1.0 || t >= 1.0) return 0.0;
        const double z = (zr - std::atanh(t)) * root;
        return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI) * root / (1.0 - t * t);
      }};
}

namespace {

struct BivariateSums {
  int n;
  double sx, sy, sxx, syy, sxy;  // raw sums and raw second moments
};

BivariateSums bivariate_sums(const BivariateData& d) {
  BivariateSums s{d.n(), 0, 0, 0, 0, 0};
  for (int i = 0; i < s.n; ++i) {
    s.sx += d.x[i];
    s.sy += d.y[i];
    s.sxx += d.x[i] * d.x[i];
    s.syy += d.y[i] * d.y[i];
    s.sxy += d.x[i] * d.y[i];
  }
  return s;
}

bayes::BivariateMoments centered_moments(const BivariateSums& s, double mu_x, double mu_y) {
  bayes::BivariateMoments m{};
  m.n = s.n;
  m.sum_xx = s.sxx - 2.0 * mu_x * s.sx + s.n * mu_x * mu_x;
  m.sum_yy = s.syy - 2.0 * mu_y * s.sy + s.n * mu_y * mu_y;
  m.sum_xy = s.sxy - mu_y * s.sx - mu_x * s.sy + s.n * mu_x * mu_y;
  return m;
}

// Admissible-truncation cache over small bins of the estimate: the largest
// usable truncation varies slowly, and the per-sweep search would otherwise
// dominate the run. Bins are evaluated at their more extreme edge, which is
// conservative.
class TruncationCache {
 public:
  explicit TruncationCache(int n) : n_(n) {}
  double at(double tau_hat) {
    const int bin = static_cast<int>(std::floor(tau_hat / kWidth));
    {
      std::lock_guard<std::mutex> lock(mu_);
      const auto it = cache_.find(bin);
      if (it != cache_.end()) return it->second;
    }
    double edge = bin < 0 ? bin * kWidth : (bin + 1) * kWidth;
    edge = std::clamp(edge, -0.9999, 0.9999);
    const double v = fiducial::select_truncation_v(n_, edge);
    std::lock_guard<std::mutex> lock(mu_);
    cache_.emplace(bin, v);
    return v;
  }

 private:
  static constexpr double kWidth = 0.005;
  int n_;
  std::mutex mu_;
  std::map<int, double> cache_;
};

}  // namespace

ScenarioSpec bivariate(const BivariateData& data, double alpha_x, double beta_x, double alpha_y,
                       double beta_y, double eps, PdoCurve pdo) {
  const int n = data.n();
  require(n >= 5, "bivariate: need at least five observations");
  require(eps > 0.0, "bivariate: eps must be positive (point-mass case unsupported)");
  require(pdo.kind() == PdoCurve::Kind::PowerLaw,
          "bivariate: configuration supports power-law curves");

  ScenarioSpec spec;
  spec.name = "bivariate";
  spec.params = {{"alpha_x", alpha_x}, {"beta_x", beta_x},       {"alpha_y", alpha_y},
                 {"beta_y", beta_y},   {"eps", eps},             {"pdo_exponent", pdo.exponent()}};

  const BivariateSums s = bivariate_sums(data);
  const double xbar = s.sx / n, ybar = s.sy / n;

  // Parameter order: mu_x, mu_y, sigma2_x, sigma2_y, tau.
  ConditionalSpec mu_x;
  mu_x.name = "mu_x";
  mu_x.builder = [n, xbar, ybar](const std::vector<double>& v) {
    const double tau = v[4];
    const double m = xbar + tau * std::sqrt(v[2] / v[3]) * (v[1] - ybar);
    return direct_density(Normal(m, v[2] * (1.0 - tau * tau) / n));
  };
  ConditionalSpec mu_y;
  mu_y.name = "mu_y";
  mu_y.builder = [n, xbar, ybar](const std::vector<double>& v) {
    const double tau = v[4];
    const double m = ybar + tau * std::sqrt(v[3] / v[2]) * (v[0] - xbar);
    return direct_density(Normal(m, v[3] * (1.0 - tau * tau) / n));
  };

  ConditionalSpec var_x;
  var_x.name = "sigma2_x";
  var_x.update = UpdateKind::Metropolis;
  var_x.metropolis_scale = 0.25;
  var_x.builder = [s, alpha_x, beta_x](const std::vector<double>& v) {
    ConditionalDensity cd;
    cd.logpdf = bayes::bivariate_variance_logdensity(
        bayes::Axis::X, alpha_x, beta_x, centered_moments(s, v[0], v[1]), v[3], v[4]);
    return cd;
  };
  ConditionalSpec var_y;
  var_y.name = "sigma2_y";
  var_y.update = UpdateKind::Metropolis;
  var_y.metropolis_scale = 0.25;
  var_y.builder = [s, alpha_y, beta_y](const std::vector<double>& v) {
    ConditionalDensity cd;
    cd.logpdf = bayes::bivariate_variance_logdensity(
        bayes::Axis::Y, alpha_y, beta_y, centered_moments(s, v[0], v[1]), v[2], v[4]);
    return cd;
  };

  const auto vcache = std::make_shared<TruncationCache>(n);
  const Interval interval{-eps, eps};
  const Distribution h = ScaledBeta(4.0, 4.0, -eps, eps);
  ConditionalSpec tau;
  tau.name = "tau";
  tau.update = UpdateKind::Metropolis;
  tau.metropolis_scale = 0.2;
  tau.builder = [s, n, eps, pdo, interval, h, vcache](const std::vector<double>& v) {
    const bayes::BivariateMoments m = centered_moments(s, v[0], v[1]);
    const double tau_hat =
        tau_mle(n, m.sum_xx / v[2], m.sum_yy / v[3], m.sum_xy / std::sqrt(v[2] * v[3]));
    const double se = 1.0 / std::sqrt(fisher_information_tau(eps, n));
    const double f_lo = normal_cdf((tau_hat + eps) / se);
    const double fp_hi = 1.0 - normal_cdf((tau_hat - eps) / se);
    const Orientation side = bispatial::choose_orientation(f_lo, fp_hi);
    const double kappa = bispatial::pdo_kappa(pdo, side == Orientation::Lower ? f_lo : fp_hi);
    const double trunc = vcache->at(tau_hat);
    auto f_s = std::make_shared<fiducial::FiducialDensity>(
        fiducial::fiducial_density_unchecked(fiducial::tau_mapping(tau_hat, n, trunc)));
    BispatialSpec bs(interval, h, pdo, f_s, side);
    auto b = std::make_shared<bispatial::BDensity>(
        bispatial::build_b_density(bs, kappa, /*with_cdf_cache=*/false));
    ConditionalDensity cd;
    cd.logpdf = [b](double x) { return b->logpdf(x); };
    return cd;
  };

  spec.conditionals = {mu_x, mu_y, var_x, var_y, tau};

  // Data summaries for the starting point and the overlay curves.
  double sxx_c = 0.0, syy_c = 0.0, sxy_c = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx_c += (data.x[i] - xbar) * (data.x[i] - xbar);
    syy_c += (data.y[i] - ybar) * (data.y[i] - ybar);
    sxy_c += (data.x[i] - xbar) * (data.y[i] - ybar);
  }
  const double var_x_hat = sxx_c / (n - 1), var_y_hat = syy_c / (n - 1);
  const double r = sxy_c / std::sqrt(sxx_c * syy_c);
  spec.initial = {xbar, ybar, var_x_hat, var_y_hat, r};

  spec.references = {
      curve_from("mu_x_marginal", NonStdT(n - 1.0, xbar, std::sqrt(var_x_hat / n))),
      curve_from("mu_y_marginal", NonStdT(n - 1.0, ybar, std::sqrt(var_y_hat / n))),
      curve_from("sigma2_x_marginal", InvGamma(0.5 * (n - 1), 0.5 * (n - 1) * var_x_hat)),
      curve_from("sigma2_y_marginal", InvGamma(0.5 * (n - 1), 0.5 * (n - 1) * var_y_hat)),
      curve_from("sigma2_x_prior", InvGamma(alpha_x, beta_x)),
      curve_from("sigma2_y_prior", InvGamma(alpha_y, beta_y)),
      confidence_density_tau(r, n),
  };
  validate_names(spec);
  return spec;
}

// ---------------------------------------------------------------------------
// Synthetic data

RegressionData generate_synthetic_regression(std::uint64_t seed,
                                             const std::array<double, 4>& beta, double sigma) {
  require(sigma > 0.0, "generate_synthetic_regression: sigma must be positive");
  // Fixed design: 18 covariate triples over {-1,0,1}^3, distinct, chosen so
  // the cross-product sums are (-1, 2, 1, 3, 4, -3).
  static constexpr int kDesign[18][3] = {
      {-1, -1, -1}, {-1, -1, 0}, {-1, -1, 1}, {-1, 0, -1}, {-1, 1, -1}, {-1, 1, 0},
      {0, -1, 0},   {0, -1, 1},  {0, 0, -1},  {0, 0, 1},   {0, 1, -1},  {0, 1, 0},
      {0, 1, 1},    {1, -1, 1},  {1, 0, 1},   {1, 1, -1},  {1, 1, 0},   {1, 1, 1}};
  RandomStream rng(seed);
  RegressionData d;
  for (const auto& row : kDesign) {
    d.x1.push_back(row[0]);
    d.x2.push_back(row[1]);
    d.x3.push_back(row[2]);
    d.y.push_back(beta[0] + beta[1] * row[0] + beta[2] * row[1] + beta[3] * row[2] +
                  sigma * rng.normal01());
  }
  return d;
}

BivariateData generate_synthetic_bivariate(std::uint64_t seed, int n, double mu_x, double mu_y,
                                           double sd_x, double sd_y, double tau) {
  require(n >= 1, "generate_synthetic_bivariate: need n >= 1");
  require(sd_x > 0.0 && sd_y > 0.0, "generate_synthetic_bivariate: sds must be positive");
  require(std::fabs(tau) < 1.0, "generate_synthetic_bivariate: |tau| must be below 1");
  RandomStream rng(seed);
  BivariateData d;
  const double rest = std::sqrt(1.0 - tau * tau);
  for (int i = 0; i < n; ++i) {
    const double z1 = rng.normal01();
    const double z2 = rng.normal01();
    d.x.push_back(mu_x + sd_x * z1);
    d.y.push_back(mu_y + sd_y * (tau * z1 + rest * z2));
  }
  return d;
}

// ---------------------------------------------------------------------------
// Registry

namespace {

double get_or(const std::map<std::string, double>& m, const std::string& key, double fallback) {
  const auto it = m.find(key);
  return it == m.end() ? fallback : it->second;
}

}  // namespace

std::vector<std::string> scenario_names() {
  return {"student_fiducial", "student_bayes_sigma", "student_bayes_mu", "student_bispatial",
          "trinomial",        "regression",          "bivariate"};
}

ScenarioSpec build_scenario(const std::string& name,
                            const std::map<std::string, double>& o) {
  if (name == "student_fiducial") {
    return student_fiducial(int(get_or(o, "n", 9)), get_or(o, "xbar", 2.7), get_or(o, "s2", 9.0));
  }
  if (name == "student_bayes_sigma") {
    return student_bayes_sigma(int(get_or(o, "n", 9)), get_or(o, "xbar", 2.7),
                               get_or(o, "s2", 9.0), get_or(o, "alpha0", 4.0),
                               get_or(o, "beta0", 64.0));
  }
  if (name == "student_bayes_mu") {
    return student_bayes_mu(int(get_or(o, "n", 9)), get_or(o, "xbar", 2.7), get_or(o, "s2", 9.0),
                            get_or(o, "nu0", 17.0), get_or(o, "mu0", -0.3),
                            get_or(o, "sigma0", 4.0 / 3.0));
  }
  if (name == "student_bispatial") {
    ScenarioSpec spec = student_bispatial(
        int(get_or(o, "n", 9)), get_or(o, "xbar", 2.7), get_or(o, "s2", 9.0),
        get_or(o, "mu1", 0.0), get_or(o, "eps", 0.2),
        PdoCurve::power_law(get_or(o, "pdo_exponent", 0.6)), get_or(o, "alpha0", 4.0),
        get_or(o, "beta0", 64.0));
    return spec;
  }
  if (name == "trinomial") {
    return trinomial(TrinomialCounts{int(get_or(o, "x1", 4)), int(get_or(o, "x2", 2)),
                                     int(get_or(o, "x3", 6))},
                     get_or(o, "alpha", 1.5), get_or(o, "beta", 11.5));
  }
  if (name == "regression") {
    const std::uint64_t data_seed = std::uint64_t(get_or(o, "data_seed", 101));
    const std::array<double, 4> beta{get_or(o, "b0", 0.0), get_or(o, "b1", 5.0),
                                     get_or(o, "b2", -2.0), get_or(o, "b3", 1.0)};
    const double sigma = get_or(o, "sigma", 1.5);
    ScenarioSpec spec =
        regression(generate_synthetic_regression(data_seed, beta, sigma), get_or(o, "mu0", 4.4),
                   get_or(o, "sigma0", 0.6), get_or(o, "delta", 0.1),
                   PdoCurve::power_law(get_or(o, "pdo_exponent", 0.6)));
    spec.params.insert(spec.params.begin(),
                       {{"data_seed", double(data_seed)},
                        {"b0", beta[0]},
                        {"b1", beta[1]},
                        {"b2", beta[2]},
                        {"b3", beta[3]},
                        {"sigma", sigma}});
    return spec;
  }
  if (name == "bivariate") {
    const std::uint64_t data_seed = std::uint64_t(get_or(o, "data_seed", 202));
    const int n = int(get_or(o, "n", 100));
    const double tau = get_or(o, "tau", 0.3);
    ScenarioSpec spec = bivariate(
        generate_synthetic_bivariate(data_seed, n, 0.0, 0.0, 1.0, 1.0, tau),
        get_or(o, "alpha_x", 49.5), get_or(o, "beta_x", 48.0), get_or(o, "alpha_y", 49.5),
        get_or(o, "beta_y", 34.0), get_or(o, "eps", 0.02),
        PdoCurve::power_law(get_or(o, "pdo_exponent", 0.6)));
    spec.params.insert(spec.params.begin(),
                       {{"data_seed", double(data_seed)}, {"n", double(n)}, {"tau", tau}});
    return spec;
  }
  throw std::out_of_range("unknown scenario: " + name);
}

}  // namespace ioi::scenarios
