#pragma once

// Uniform 1D grid, field state and the three-point Laplacian.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "sgavg/csv.hpp"
#include "sgavg/errors.hpp"

namespace sgavg {

enum class Boundary { periodic, neumann_zero };

class Grid1D {
 public:
  Grid1D(double x_min, double x_max, std::size_t n, Boundary boundary = Boundary::neumann_zero)
      : x_min_(x_min), x_max_(x_max), n_(n), boundary_(boundary) {
    if (!(x_max > x_min)) throw ContractViolation("grid needs x_max > x_min");
    if (n < 8) throw ContractViolation("grid needs at least 8 points");
    const double span = x_max - x_min;
    dx_ = boundary == Boundary::periodic ? span / static_cast<double>(n)
                                         : span / static_cast<double>(n - 1);
  }

  /// Grid covering [-half_width, half_width] with spacing as close to `dx` as
  /// the node count allows (never coarser).
  static Grid1D centered(double half_width, double dx, Boundary boundary = Boundary::neumann_zero) {
    if (!(dx > 0.0) || !(half_width > 0.0)) throw ContractViolation("grid needs dx, half-width > 0");
    const double cells = std::ceil(2.0 * half_width / dx - 1e-9);
    const auto n = static_cast<std::size_t>(cells) + (boundary == Boundary::periodic ? 0 : 1);
    return Grid1D(-half_width, half_width, std::max<std::size_t>(n, 8), boundary);
  }

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t size() const noexcept { return n_; }
  double dx() const noexcept { return dx_; }
  Boundary boundary() const noexcept { return boundary_; }
  bool periodic() const noexcept { return boundary_ == Boundary::periodic; }

  double x(std::size_t i) const noexcept { return x_min_ + dx_ * static_cast<double>(i); }

  std::vector<double> nodes() const {
    std::vector<double> xs(n_);
    for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
    return xs;
  }

  /// Trapezoid weight of node i (rectangle rule on periodic grids).
  double weight(std::size_t i) const noexcept {
    if (!periodic() && (i == 0 || i + 1 == n_)) return 0.5 * dx_;
    return dx_;
  }

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  Boundary boundary_;
  double dx_ = 0.0;
};

struct FieldState {
  std::vector<double> u;
  std::vector<double> p;
  double t = 0.0;

  std::size_t size() const noexcept { return u.size(); }
};

inline FieldState zero_state(const Grid1D& grid, double t = 0.0) {
  return FieldState{std::vector<double>(grid.size(), 0.0), std::vector<double>(grid.size(), 0.0), t};
}

inline void require_on_grid(const FieldState& s, const Grid1D& grid) {
  if (s.u.size() != grid.size() || s.p.size() != grid.size())
    throw ContractViolation("field length does not match grid");
}

/// out = (f[i-1] - 2 f[i] + f[i+1]) / dx^2 with periodic wrap or mirrored
/// ghost nodes (f[-1] = f[1], f[n] = f[n-2]).
inline void laplacian(std::span<const double> f, const Grid1D& grid, std::span<double> out) {
  const std::size_t n = grid.size();
  if (f.size() != n || out.size() != n) throw ContractViolation("laplacian: length mismatch");
  const double inv = 1.0 / (grid.dx() * grid.dx());
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i - 1] - 2.0 * f[i] + f[i + 1]) * inv;
  if (grid.periodic()) {
    out[0] = (f[n - 1] - 2.0 * f[0] + f[1]) * inv;
    out[n - 1] = (f[n - 2] - 2.0 * f[n - 1] + f[0]) * inv;
  } else {
    out[0] = 2.0 * (f[1] - f[0]) * inv;
    out[n - 1] = 2.0 * (f[n - 2] - f[n - 1]) * inv;
  }
}

inline std::vector<double> laplacian(std::span<const double> f, const Grid1D& grid) {
  std::vector<double> out(f.size());
  laplacian(f, grid, out);
  return out;
}

/// Centered first difference; zero at mirrored boundaries.
inline double centered_gradient(std::span<const double> f, const Grid1D& grid, std::size_t i) {
  const std::size_t n = grid.size();
  if (i == 0) return grid.periodic() ? (f[1] - f[n - 1]) / (2.0 * grid.dx()) : 0.0;
  if (i + 1 == n) return grid.periodic() ? (f[0] - f[n - 2]) / (2.0 * grid.dx()) : 0.0;
  return (f[i + 1] - f[i - 1]) / (2.0 * grid.dx());
}

inline double sup_norm_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractViolation("sup_norm_diff: grid mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double sup_norm_diff(const FieldState& a, const FieldState& b) {
  return sup_norm_diff(a.u, b.u);
}

inline std::string snapshot_name(double t) { return "snap_" + csv::fixed6(t) + ".csv"; }

/// Writes `x,u,p`, one row per node.
inline void write_snapshot(const std::filesystem::path& file, const FieldState& s, const Grid1D& grid) {
  std::ofstream out(file);
  out << "x,u,p\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    out << csv::num(grid.x(i)) << ',' << csv::num(s.u[i]) << ',' << csv::num(s.p[i]) << '\n';
}

}  // namespace sgavg
