#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ioi {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Closed-or-infinite interval [lo, hi] on the real line.
struct Interval {
  double lo = -kInf;
  double hi = kInf;

  bool contains(double x) const { return x >= lo && x <= hi; }
  bool contains_interior(double x) const { return x > lo && x < hi; }
  double width() const { return hi - lo; }
  bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }
};

inline Interval real_line() { return Interval{-kInf, kInf}; }
inline Interval positive_half_line() { return Interval{0.0, kInf}; }

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace ioi
