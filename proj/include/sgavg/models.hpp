#pragma once

// The driven sine-Gordon variants, their averaged counterparts, and the
// first-order systems that are actually integrated (in slow time t).
//
//   full1   u_tt - u_xx + f(t/e) sin u = 0
//   full8   u_tt - u_xx + (1/e) f(t/e) sin u = 0
//   full10  u_tt - u_xx + (1 + (1/e) f(t/e)) sin u = 0
//   full13  u_tt - u_xx + (1 + f(t/e)) sin u = 0
//   avg7    u_tt - u_xx + e^2 (D/2) sin 2u = 0
//   avg9    u_tt - u_xx + (D/2) sin 2u = 0
//   avg12   u_tt - u_xx + sin u + (D/2) sin 2u = 0
//   avg13   u_tt - u_xx + sin u + e^2 (D/2) sin 2u = 0
//
// The driven variants use p = u_t + a f_{-1}(t/e) sin u with a = e (full1,
// full13) or a = 1 (full8, full10).

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sgavg/errors.hpp"
#include "sgavg/field.hpp"
#include "sgavg/forcing.hpp"

namespace sgavg {

enum class Variant { full1, full8, full10, full13, avg7, avg9, avg12, avg13, free_wave };

inline constexpr std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::full1: return "full1";
    case Variant::full8: return "full8";
    case Variant::full10: return "full10";
    case Variant::full13: return "full13";
    case Variant::avg7: return "avg7";
    case Variant::avg9: return "avg9";
    case Variant::avg12: return "avg12";
    case Variant::avg13: return "avg13";
    case Variant::free_wave: return "freewave";
  }
  return "?";
}

inline std::optional<Variant> parse_variant(std::string_view name) {
  for (Variant v : {Variant::full1, Variant::full8, Variant::full10, Variant::full13, Variant::avg7,
                    Variant::avg9, Variant::avg12, Variant::avg13, Variant::free_wave})
    if (variant_name(v) == name) return v;
  return std::nullopt;
}

inline constexpr bool is_driven(Variant v) {
  return v == Variant::full1 || v == Variant::full8 || v == Variant::full10 || v == Variant::full13;
}

inline constexpr bool is_averaged(Variant v) {
  return v == Variant::avg7 || v == Variant::avg9 || v == Variant::avg12 || v == Variant::avg13;
}

inline constexpr bool needs_epsilon(Variant v) {
  return is_driven(v) || v == Variant::avg7 || v == Variant::avg13;
}

/// Whether the model carries the static (1 - cos u) pendulum potential.
inline constexpr bool has_sine_term(Variant v) {
  return v == Variant::full10 || v == Variant::full13 || v == Variant::avg12 || v == Variant::avg13;
}

class ModelSpec {
 public:
  /// Validating factory. Driven variants need `stack`; averaged variants
  /// need `delta` or `stack` (both must agree to 1e-12 when given).
  static ModelSpec make(Variant variant, std::optional<double> epsilon = std::nullopt,
                        std::optional<ForcingStack> stack = std::nullopt,
                        std::optional<double> delta = std::nullopt) {
    ModelSpec m;
    m.variant_ = variant;
    if (needs_epsilon(variant)) {
      if (!epsilon) throw ConfigError("epsilon", std::string(variant_name(variant)) + " requires epsilon");
      if (!(*epsilon > 0.0) || !std::isfinite(*epsilon))
        throw ConfigError("epsilon", "epsilon must be positive");
      m.epsilon_ = *epsilon;
    }
    if (is_driven(variant) && !stack)
      throw ConfigError("forcing", std::string(variant_name(variant)) + " requires a forcing");
    if (is_averaged(variant)) {
      if (!delta && !stack)
        throw ConfigError("delta", std::string(variant_name(variant)) + " requires delta or a forcing");
      if (delta && stack && std::abs(*delta - stack->delta) > 1e-12 * std::max(1.0, std::abs(*delta)))
        throw ConfigError("delta", "delta disagrees with the forcing stack");
      const double d = delta ? *delta : stack->delta;
      if (!(d >= 0.0) || !std::isfinite(d)) throw ConfigError("delta", "delta must be nonnegative");
      m.delta_ = d;
    }
    if (stack) {
      if (!is_averaged(variant)) m.delta_ = stack->delta;
      m.stack_ = std::move(stack);
    }
    return m;
  }

  Variant variant() const noexcept { return variant_; }
  double epsilon() const noexcept { return epsilon_; }
  double delta() const noexcept { return delta_; }
  bool driven() const noexcept { return is_driven(variant_); }
  const ForcingStack& stack() const {
    if (!stack_) throw ConfigError("forcing", "model has no forcing stack");
    return *stack_;
  }
  bool has_stack() const noexcept { return stack_.has_value(); }

  /// Multiplier a of f_{-1} in du/dt = p - a f_{-1}(t/e) sin u.
  double drive_coupling() const noexcept {
    switch (variant_) {
      case Variant::full1:
      case Variant::full13: return epsilon_;
      case Variant::full8:
      case Variant::full10: return 1.0;
      default: return 0.0;
    }
  }

  /// kappa in the averaged force (kappa/2) sin 2u.
  double dsg_coefficient() const noexcept {
    switch (variant_) {
      case Variant::avg7:
      case Variant::avg13: return epsilon_ * epsilon_ * delta_;
      case Variant::avg9:
      case Variant::avg12: return delta_;
      default: return 0.0;
    }
  }

  double sine_coefficient() const noexcept { return has_sine_term(variant_) ? 1.0 : 0.0; }

  /// f_{-1}(t/e), zero for autonomous variants.
  double drive_phase_value(double t) const {
    if (!driven()) return 0.0;
    return stack_->f_minus1(t / epsilon_);
  }

  /// Coefficient g(t) of the parametric term g(t) sin u in the second-order form.
  double parametric_coefficient(double t) const {
    if (!driven()) return 0.0;
    return drive_coupling() / epsilon_ * stack_->f(t / epsilon_);
  }

 private:
  ModelSpec() = default;

  Variant variant_ = Variant::free_wave;
  double epsilon_ = 0.0;
  double delta_ = 0.0;
  std::optional<ForcingStack> stack_;
};

/// First-order right-hand side (du/dt, dp/dt) at time t.
inline void rhs(std::span<const double> u, std::span<const double> p, double t, const ModelSpec& model,
                const Grid1D& grid, std::span<double> du, std::span<double> dp) {
  const std::size_t n = grid.size();
  if (u.size() != n || p.size() != n || du.size() != n || dp.size() != n)
    throw ContractViolation("rhs: field length does not match grid");
  laplacian(u, grid, dp);
  const double s = model.sine_coefficient();
  if (model.driven()) {
    const double ap = model.drive_coupling() * model.drive_phase_value(t);
    const double half_ap2 = 0.5 * ap * ap;
    for (std::size_t i = 0; i < n; ++i) {
      const double su = std::sin(u[i]);
      const double cu = std::cos(u[i]);
      du[i] = p[i] - ap * su;
      dp[i] += -s * su + ap * p[i] * cu - half_ap2 * 2.0 * su * cu;
    }
    return;
  }
  const double half_kappa = 0.5 * model.dsg_coefficient();
  for (std::size_t i = 0; i < n; ++i) {
    du[i] = p[i];
    if (s != 0.0 || half_kappa != 0.0) dp[i] -= s * std::sin(u[i]) + half_kappa * std::sin(2.0 * u[i]);
  }
}

inline std::pair<std::vector<double>, std::vector<double>> rhs(const FieldState& state, double t,
                                                               const ModelSpec& model,
                                                               const Grid1D& grid) {
  require_on_grid(state, grid);
  std::vector<double> du(grid.size()), dp(grid.size());
  rhs(state.u, state.p, t, model, grid, du, dp);
  return {std::move(du), std::move(dp)};
}

/// Second-order form u_tt = u_xx - a(u, t), written into `acc` as the full
/// acceleration (Laplacian included).
inline void acceleration(std::span<const double> u, double t, const ModelSpec& model,
                         const Grid1D& grid, std::span<double> acc) {
  laplacian(u, grid, acc);
  const double s = model.sine_coefficient() + model.parametric_coefficient(t);
  const double half_kappa = 0.5 * model.dsg_coefficient();
  if (s == 0.0 && half_kappa == 0.0) return;
  for (std::size_t i = 0; i < u.size(); ++i)
    acc[i] -= s * std::sin(u[i]) + half_kappa * std::sin(2.0 * u[i]);
}

/// p -> u_t at time t (identity for autonomous variants).
inline void momentum_to_velocity(std::span<const double> u, std::span<double> p_to_v, double t,
                                 const ModelSpec& model) {
  if (!model.driven()) return;
  const double ap = model.drive_coupling() * model.drive_phase_value(t);
  for (std::size_t i = 0; i < u.size(); ++i) p_to_v[i] -= ap * std::sin(u[i]);
}

inline void velocity_to_momentum(std::span<const double> u, std::span<double> v_to_p, double t,
                                 const ModelSpec& model) {
  if (!model.driven()) return;
  const double ap = model.drive_coupling() * model.drive_phase_value(t);
  for (std::size_t i = 0; i < u.size(); ++i) v_to_p[i] += ap * std::sin(u[i]);
}

/// Autonomous potential V(u) with V' equal to the model's potential force,
/// gauged to vanish at the vacuum u = 0.
inline double potential_density(double u, const ModelSpec& model) {
  if (model.driven())
    throw ConfigError("model", "potential_density is undefined for driven variant " +
                                   std::string(variant_name(model.variant())));
  return model.sine_coefficient() * (1.0 - std::cos(u)) +
         0.25 * model.dsg_coefficient() * (1.0 - std::cos(2.0 * u));
}

inline double potential_force(double u, const ModelSpec& model) {
  return model.sine_coefficient() * std::sin(u) + 0.5 * model.dsg_coefficient() * std::sin(2.0 * u);
}

/// Instantaneous Hamiltonian of the integrated system,
///   H = sum_i w_i [ (u_t)^2/2 + (u_x)^2/2 + V(u) ],
/// with u_t recovered from p, centered u_x, and V the static part of the
/// potential (for driven variants the parametric term is carried by p).
inline double energy(const FieldState& state, const ModelSpec& model, const Grid1D& grid) {
  require_on_grid(state, grid);
  const double ap = model.drive_coupling() * model.drive_phase_value(state.t);
  const double s = model.sine_coefficient();
  const double quarter_kappa = 0.25 * model.dsg_coefficient();
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double u = state.u[i];
    const double v = state.p[i] - ap * std::sin(u);
    const double ux = centered_gradient(state.u, grid, i);
    const double pot = s * (1.0 - std::cos(u)) + quarter_kappa * (1.0 - std::cos(2.0 * u));
    sum += grid.weight(i) * (0.5 * v * v + 0.5 * ux * ux + pot);
  }
  return sum;
}

}  // namespace sgavg
