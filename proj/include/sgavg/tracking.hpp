#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sgavg/errors.hpp"
#include "sgavg/field.hpp"

namespace sgavg {

/// Position where u crosses `level`, by linear interpolation between the
/// bracketing nodes. Throws TrackingError unless there is exactly one crossing.
inline double level_crossing(std::span<const double> u, const Grid1D& grid, double level, double t = 0.0) {
  std::optional<double> found;
  std::size_t count = 0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const double a = u[i] - level;
    const double b = u[i + 1] - level;
    if ((a >= 0.0) == (b >= 0.0)) continue;
    ++count;
    found = grid.x(i) + grid.dx() * (a / (a - b));
  }
  if (count != 1)
    throw TrackingError(t, "expected one level crossing at t=" + std::to_string(t) + ", found " +
                               std::to_string(count));
  return *found;
}

/// Least-squares slope of y against x.
inline double ls_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / sxx;
}

/// Slope over the trailing half (rounded up) of the series.
inline double trailing_half_slope(std::span<const double> t, std::span<const double> x) {
  const std::size_t n = t.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t keep = std::max<std::size_t>(2, (n + 1) / 2);
  return ls_slope(t.subspan(n - keep), x.subspan(n - keep));
}

}  // namespace sgavg
