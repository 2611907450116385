#pragma once

#include <cstddef>

namespace sgavg::quad {

inline constexpr std::size_t kPeriodPanels = 4096;

inline double periodic_trapezoid(auto&& fn, double period, std::size_t panels) {
  const double h = period / static_cast<double>(panels);
  double sum = 0.0;
  for (std::size_t i = 0; i < panels; ++i) sum += fn(h * static_cast<double>(i));
  return sum / static_cast<double>(panels);
}

/// Mean of a T-periodic function over one period.
///
/// Composite trapezoid on `panels` panels with one Richardson step against
/// the half-resolution sum. For smooth periodic integrands both sums are
/// already spectrally accurate; the extrapolation makes the rule exact on
/// piecewise quadratics whose breakpoints sit on even nodes (square-wave
/// antiderivatives at phase 0 and T/2).
inline double periodic_mean(auto&& fn, double period, std::size_t panels = kPeriodPanels) {
  const double fine = periodic_trapezoid(fn, period, panels);
  const double coarse = periodic_trapezoid(fn, period, panels / 2);
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace sgavg::quad
