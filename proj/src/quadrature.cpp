#include "ioi/quadrature.hpp"

#include <cmath>

namespace ioi {

double trapezoid(const std::function<double(double)>& f, double lo, double hi, int n) {
  require(n >= 1, "trapezoid: need at least one panel");
  require(std::isfinite(lo) && std::isfinite(hi) && hi > lo, "trapezoid: bad interval");
  const double h = (hi - lo) / n;
  double sum = 0.5 * (f(lo) + f(hi));
  for (int i = 1; i < n; ++i) sum += f(lo + i * h);
  return sum * h;
}

double adaptive_trapezoid(const std::function<double(double)>& f, double lo, double hi,
                          double abs_tol, double rel_tol, int initial_n, int max_n) {
  require(std::isfinite(lo) && std::isfinite(hi) && hi > lo, "adaptive_trapezoid: bad interval");
  int n = initial_n;
  double h = (hi - lo) / n;
  double sum = 0.5 * (f(lo) + f(hi));
  for (int i = 1; i < n; ++i) sum += f(lo + i * h);
  double estimate = sum * h;
  while (n < max_n) {
    // Add the midpoints of the current panels.
    double add = 0.0;
    for (int i = 0; i < n; ++i) add += f(lo + (i + 0.5) * h);
    const double refined = 0.5 * estimate + 0.5 * h * add;
    n *= 2;
    h *= 0.5;
    const double change = std::fabs(refined - estimate);
    estimate = refined;
    if (change <= abs_tol || change <= rel_tol * std::fabs(estimate)) break;
  }
  return estimate;
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& x,
                                         const std::vector<double>& fx) {
  require(x.size() == fx.size() && x.size() >= 2, "cumulative_trapezoid: size mismatch");
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) {
    out[i] = out[i - 1] + 0.5 * (fx[i] + fx[i - 1]) * (x[i] - x[i - 1]);
  }
  return out;
}

}  // namespace ioi
