#pragma once

#include <functional>
#include <vector>

#include "ioi/common.hpp"

namespace ioi {

/// Composite trapezoid rule with n+1 equally spaced nodes on [lo, hi].
double trapezoid(const std::function<double(double)>& f, double lo, double hi, int n);

/// Trapezoid rule with doubling refinement until the estimate moves by less
/// than max(abs_tol, rel_tol * |estimate|) or the node budget is exhausted.
double adaptive_trapezoid(const std::function<double(double)>& f, double lo, double hi,
                          double abs_tol = 1e-10, double rel_tol = 1e-10,
                          int initial_n = 64, int max_n = 1 << 22);

/// Cumulative trapezoid over a node grid: out[i] = integral up to x[i].
std::vector<double> cumulative_trapezoid(const std::vector<double>& x,
                                         const std::vector<double>& fx);

}  // namespace ioi
