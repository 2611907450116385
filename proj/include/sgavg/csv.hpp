#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace sgavg::csv {

/// 17 significant digits: round-trips every double, so equal runs give equal bytes.
inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fixed6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace sgavg::csv
