#pragma once

#include <variant>

#include "ioi/common.hpp"
#include "ioi/rng.hpp"

namespace ioi {

// Univariate distribution primitives. Parametrizations are fixed here once
// and used verbatim everywhere else; constructors reject bad parameters.

struct Normal {
  double mean;
  double variance;  // > 0
  Normal(double mean, double variance);
};

/// Inverse gamma in the shape/scale convention: density proportional to
/// x^(-shape-1) exp(-scale/x) on x > 0, so the mean is scale/(shape-1) for
/// shape > 1. (Scale here is NOT a rate; rate/scale confusion is the
/// classic bug, hence the explicit field names.)
struct InvGamma {
  double shape;  // > 0
  double scale;  // > 0
  InvGamma(double shape, double scale);
};

/// Student t with location and scale: the standard t(df) density of
/// (x - location)/scale, divided by scale.
struct NonStdT {
  double df;        // > 0
  double location;
  double scale;     // > 0
  NonStdT(double df, double location, double scale);
};

/// Beta(a, b) density linearly mapped onto [lo, hi].
struct ScaledBeta {
  double a;   // > 0
  double b;   // > 0
  double lo;
  double hi;  // > lo
  ScaledBeta(double a, double b, double lo, double hi);
};

/// Standard normal truncated to (lo, hi).
struct TruncNormal {
  double lo;
  double hi;  // > lo
  TruncNormal(double lo, double hi);
};

struct Binomial {
  int trials;  // >= 0
  double p;    // in [0, 1]
  Binomial(int trials, double p);
};

using Distribution = std::variant<Normal, InvGamma, NonStdT, ScaledBeta, TruncNormal, Binomial>;

/// Natural log of the density (or mass) at x; -infinity outside support.
double logpdf(const Distribution& d, double x);
double pdf(const Distribution& d, double x);

/// P(X <= x), monotone non-decreasing in x.
double cdf(const Distribution& d, double x);

/// Inverse cdf for continuous variants, computed by bracketed bisection on
/// cdf to 1e-12 interval width. Throws on discrete variants and p outside (0,1).
double quantile(const Distribution& d, double p);

/// One draw from d; deterministic given the stream state.
double sample(const Distribution& d, RandomStream& rng);

/// Support as an interval (interior is where the density can be positive).
Interval support(const Distribution& d);

bool is_discrete(const Distribution& d);
double mean(const Distribution& d);

// Standard normal helpers used throughout the engine.
double normal_cdf(double z);
double normal_quantile(double p);

}  // namespace ioi
