#pragma once

// Zero-mean periodic excitations and their zero-mean antiderivatives.
//
// Every forcing is stored as a finite Fourier series without a constant term,
// so the antiderivative is exact term by term. Square waves additionally carry
// an exact piecewise evaluator; its antiderivatives (triangle, then a
// piecewise parabola) stay exact as well.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "sgavg/errors.hpp"
#include "sgavg/quadrature.hpp"

namespace sgavg {

enum class Waveform { cosine, square, custom_series };

/// Unit shapes of the square-wave antiderivative chain, in phase s in [0, 2pi).
enum class ExactShape { none, square, triangle, parabola };

inline constexpr std::size_t kSquareHarmonics = 64;

namespace detail {

inline double unit_shape(ExactShape shape, double s) {
  constexpr double pi = std::numbers::pi;
  switch (shape) {
    case ExactShape::square:
      if (s == 0.0 || s == pi) return 0.0;
      return s < pi ? 1.0 : -1.0;
    case ExactShape::triangle:
      return s <= pi ? s - pi / 2 : 1.5 * pi - s;
    case ExactShape::parabola:
      return s <= pi ? 0.5 * s * s - 0.5 * pi * s : 1.5 * pi * s - 0.5 * s * s - pi * pi;
    case ExactShape::none:
      break;
  }
  return 0.0;
}

inline ExactShape integrate_shape(ExactShape shape) {
  switch (shape) {
    case ExactShape::square: return ExactShape::triangle;
    case ExactShape::triangle: return ExactShape::parabola;
    default: return ExactShape::none;
  }
}

}  // namespace detail

/// A zero-mean T-periodic function
///   f(tau) = sum_k a_k cos(k w tau) + b_k sin(k w tau),  w = 2 pi / T,  k = 1..K.
/// There is no k = 0 slot, so a nonzero mean is unrepresentable.
class PeriodicForcing {
 public:
  PeriodicForcing() = default;

  PeriodicForcing(double period, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs,
                  Waveform tag = Waveform::custom_series)
      : period_(period), a_(std::move(cos_coeffs)), b_(std::move(sin_coeffs)), tag_(tag) {
    if (!(period_ > 0.0) || !std::isfinite(period_))
      throw ContractViolation("forcing period must be positive and finite");
    const std::size_t k = std::max(a_.size(), b_.size());
    a_.resize(k, 0.0);
    b_.resize(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
      if (!std::isfinite(a_[i]) || !std::isfinite(b_[i]))
        throw ContractViolation("forcing coefficients must be finite");
  }

  double period() const noexcept { return period_; }
  double omega() const noexcept { return 2.0 * std::numbers::pi / period_; }
  std::size_t harmonics() const noexcept { return a_.size(); }
  const std::vector<double>& cos_coeffs() const noexcept { return a_; }
  const std::vector<double>& sin_coeffs() const noexcept { return b_; }
  Waveform tag() const noexcept { return tag_; }
  ExactShape exact_shape() const noexcept { return exact_; }
  double exact_scale() const noexcept { return exact_scale_; }
  bool has_exact() const noexcept { return exact_ != ExactShape::none; }

  /// Phase w * (tau mod T) in [0, 2 pi).
  double phase(double tau) const {
    double r = std::fmod(tau, period_);
    if (r < 0.0) r += period_;
    double s = omega() * r;
    if (s >= 2.0 * std::numbers::pi) s = 0.0;
    return s;
  }

  double series_value(double tau) const {
    const double s = phase(tau);
    double sum = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i) {
      const double arg = static_cast<double>(i + 1) * s;
      if (a_[i] != 0.0) sum += a_[i] * std::cos(arg);
      if (b_[i] != 0.0) sum += b_[i] * std::sin(arg);
    }
    return sum;
  }

  double operator()(double tau) const {
    if (has_exact()) return exact_scale_ * detail::unit_shape(exact_, phase(tau));
    return series_value(tau);
  }

  /// Attach an exact piecewise evaluator `scale * shape(phase)`. The Fourier
  /// coefficients remain the truncated series of the same function.
  PeriodicForcing with_exact(ExactShape shape, double scale) const {
    PeriodicForcing out = *this;
    out.exact_ = shape;
    out.exact_scale_ = scale;
    return out;
  }

 private:
  double period_ = 2.0 * std::numbers::pi;
  std::vector<double> a_;
  std::vector<double> b_;
  Waveform tag_ = Waveform::custom_series;
  ExactShape exact_ = ExactShape::none;
  double exact_scale_ = 0.0;
};

inline PeriodicForcing zero_forcing(double period = 2.0 * std::numbers::pi) {
  return PeriodicForcing(period, {}, {}, Waveform::custom_series);
}

inline PeriodicForcing cosine_forcing(double amplitude, double period = 2.0 * std::numbers::pi) {
  return PeriodicForcing(period, {amplitude}, {0.0}, Waveform::cosine);
}

inline PeriodicForcing series_forcing(std::vector<double> a, std::vector<double> b,
                                      double period = 2.0 * std::numbers::pi) {
  return PeriodicForcing(period, std::move(a), std::move(b), Waveform::custom_series);
}

/// amplitude * sgn(sin(w tau)): exact evaluation plus odd harmonics up to `harmonics`.
inline PeriodicForcing square_forcing(double amplitude, double period = 2.0 * std::numbers::pi,
                                      std::size_t harmonics = kSquareHarmonics) {
  std::vector<double> a(harmonics, 0.0), b(harmonics, 0.0);
  for (std::size_t k = 1; k <= harmonics; k += 2)
    b[k - 1] = 4.0 * amplitude / (std::numbers::pi * static_cast<double>(k));
  return PeriodicForcing(period, std::move(a), std::move(b), Waveform::square)
      .with_exact(ExactShape::square, amplitude);
}

/// The unique zero-mean periodic g with g' = f.
inline PeriodicForcing antiderivative_zero_mean(const PeriodicForcing& f) {
  const double w = f.omega();
  const auto& a = f.cos_coeffs();
  const auto& b = f.sin_coeffs();
  std::vector<double> ga(a.size()), gb(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double kw = static_cast<double>(i + 1) * w;
    ga[i] = -b[i] / kw;
    gb[i] = a[i] / kw;
  }
  PeriodicForcing g(f.period(), std::move(ga), std::move(gb), Waveform::custom_series);
  if (f.has_exact()) {
    const ExactShape next = detail::integrate_shape(f.exact_shape());
    if (next != ExactShape::none) g = g.with_exact(next, f.exact_scale() / w);
  }
  return g;
}

inline double mean_square_parseval(const PeriodicForcing& g) {
  double sum = 0.0;
  const auto& a = g.cos_coeffs();
  const auto& b = g.sin_coeffs();
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * a[i] + b[i] * b[i];
  return 0.5 * sum;
}

inline double mean_square_quadrature(const PeriodicForcing& g) {
  return quad::periodic_mean([&](double tau) { const double v = g(tau); return v * v; },
                             g.period());
}

/// <g^2> over one period: Parseval for series-backed forcings, quadrature of
/// the exact evaluator when one is attached.
inline double mean_square(const PeriodicForcing& g) {
  return g.has_exact() ? mean_square_quadrature(g) : mean_square_parseval(g);
}

/// f together with f_{-1}, F_{-2} and Delta = <f_{-1}^2>.
struct ForcingStack {
  PeriodicForcing f;
  PeriodicForcing f_minus1;
  PeriodicForcing F_minus2;
  double delta = 0.0;

  double period() const noexcept { return f.period(); }
};

inline ForcingStack build_stack(const PeriodicForcing& f) {
  ForcingStack s;
  s.f = f;
  s.f_minus1 = antiderivative_zero_mean(f);
  s.F_minus2 = antiderivative_zero_mean(s.f_minus1);
  s.delta = mean_square(s.f_minus1);
  return s;
}

struct InvariantCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

namespace detail {

// Max |(g(t+h) - g(t-h)) / 2h - f(t)| over samples at least 2h from any jump
// of the exact square wave (jumps at phase 0 and pi).
inline double derivative_mismatch(const PeriodicForcing& g, const PeriodicForcing& f,
                                  std::size_t samples = 1000) {
  const double T = f.period();
  const double h = 1e-5 * T;
  const double half = 0.5 * T;
  double worst = 0.0;
  for (std::size_t j = 0; j < samples; ++j) {
    const double t = (static_cast<double>(j) + 0.5) * T / static_cast<double>(samples);
    if (f.has_exact()) {
      const double d = std::min({std::abs(t), std::abs(t - half), std::abs(t - T)});
      if (d < 2.0 * h) continue;
    }
    const double fd = (g(t + h) - g(t - h)) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - f(t)));
  }
  return worst;
}

}  // namespace detail

/// Numerical audit of the stack invariants, in a fixed order.
inline std::vector<InvariantCheck> check_stack(const ForcingStack& s) {
  std::vector<InvariantCheck> out;
  auto add = [&](std::string name, double value, double tol) {
    out.push_back({std::move(name), value, tol, std::abs(value) <= tol});
  };
  const double scale = std::max(1.0, std::sqrt(mean_square_parseval(s.f)));
  add("mean_f1", quad::periodic_mean([&](double t) { return s.f_minus1(t); }, s.period()),
      1e-10 * scale);
  add("mean_F2", quad::periodic_mean([&](double t) { return s.F_minus2(t); }, s.period()),
      1e-10 * scale);
  add("dF1_minus_f", detail::derivative_mismatch(s.f_minus1, s.f), 1e-6 * scale);
  add("dF2_minus_f1", detail::derivative_mismatch(s.F_minus2, s.f_minus1), 1e-6 * scale);
  add("delta_minus_quadrature", s.delta - mean_square_quadrature(s.f_minus1),
      1e-10 * std::max(1.0, s.delta));
  out.push_back({"delta_nonnegative", s.delta, 0.0, s.delta >= 0.0});
  return out;
}

}  // namespace sgavg
