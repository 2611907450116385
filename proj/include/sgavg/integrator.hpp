#pragma once

// Time stepping for every model variant.
//
// Leapfrog is velocity-Verlet (kick-drift-kick) on (u, u_t): p is converted
// to the velocity at the start of each step and back at the end, so the
// driven variants are stepped as the separable second-order equations they
// came from. Each half kick uses the parametric coefficient at the time of
// the positions it acts on (t_n for the first, t_n + dt for the second).
// RK4 integrates the first-order (u, p) system through rhs() directly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sgavg/errors.hpp"
#include "sgavg/field.hpp"
#include "sgavg/models.hpp"
#include "sgavg/tracking.hpp"

namespace sgavg {

enum class Scheme { leapfrog, rk4 };

inline std::optional<Scheme> parse_scheme(std::string_view s) {
  if (s == "leapfrog") return Scheme::leapfrog;
  if (s == "rk4") return Scheme::rk4;
  return std::nullopt;
}

inline constexpr double kCflFactor = 0.9;
inline constexpr double kBlowUpThreshold = 1e6;

/// Largest admissible dt: CFL guard and, for driven variants, oversample
/// steps per fast forcing period.
inline double max_stable_dt(const ModelSpec& model, const Grid1D& grid, double oversample = 64.0) {
  double dt = kCflFactor * grid.dx();
  if (model.driven()) dt = std::min(dt, model.epsilon() * model.stack().period() / oversample);
  return dt;
}

struct IntegrationPlan {
  double dt = 0.0;
  double t_end = 0.0;
  Scheme scheme = Scheme::leapfrog;
  std::size_t snapshot_stride = 1;
  double oversample = 64.0;

  /// Steps actually taken; dt is shrunk so they land exactly on t_end.
  std::size_t steps() const {
    if (t_end == 0.0) return 0;
    return static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  }
  double effective_dt() const { return steps() == 0 ? dt : t_end / static_cast<double>(steps()); }
};

/// Validating constructor. t_end = 0 is accepted as the no-op plan.
inline IntegrationPlan make_plan(const ModelSpec& model, const Grid1D& grid, double dt, double t_end,
                                 Scheme scheme = Scheme::leapfrog, std::size_t snapshot_stride = 1,
                                 double oversample = 64.0) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt", "dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end", "t_end must be nonnegative");
  if (snapshot_stride == 0) throw ConfigError("snapshot_stride", "snapshot_stride must be >= 1");
  if (!(oversample > 0.0)) throw ConfigError("oversample", "oversample must be positive");
  const double limit = max_stable_dt(model, grid, oversample);
  if (dt > limit * (1.0 + 1e-12))
    throw ConfigError("dt", "dt=" + std::to_string(dt) + " exceeds the admissible step " +
                                std::to_string(limit));
  return IntegrationPlan{dt, t_end, scheme, snapshot_stride, oversample};
}

/// Plan with the largest admissible dt not exceeding `dt_cap`.
inline IntegrationPlan auto_plan(const ModelSpec& model, const Grid1D& grid, double t_end,
                                 Scheme scheme = Scheme::leapfrog, double dt_cap = 0.5,
                                 std::size_t snapshot_stride = 1, double oversample = 64.0) {
  const double dt = std::min(dt_cap, max_stable_dt(model, grid, oversample));
  return make_plan(model, grid, dt, t_end, scheme, snapshot_stride, oversample);
}

/// Reusable stepping workspace for one grid size.
class Stepper {
 public:
  Stepper(const ModelSpec& model, const Grid1D& grid)
      : model_(model), grid_(grid), a_(grid.size()), b_(grid.size()), ku_(4, std::vector<double>(grid.size())),
        kp_(4, std::vector<double>(grid.size())) {}

  void advance(FieldState& s, double dt, Scheme scheme) {
    require_on_grid(s, grid_);
    if (dt == 0.0) return;
    if (scheme == Scheme::leapfrog) leapfrog(s, dt);
    else rk4(s, dt);
    check_finite(s);
  }

 private:
  void leapfrog(FieldState& s, double dt) {
    const std::size_t n = grid_.size();
    const double t0 = s.t;
    const double t1 = s.t + dt;
    auto& v = s.p;
    momentum_to_velocity(s.u, v, t0, model_);
    acceleration(s.u, t0, model_, grid_, a_);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] += 0.5 * dt * a_[i];
      s.u[i] += dt * v[i];
    }
    acceleration(s.u, t1, model_, grid_, a_);
    for (std::size_t i = 0; i < n; ++i) v[i] += 0.5 * dt * a_[i];
    velocity_to_momentum(s.u, v, t1, model_);
    s.t = t1;
  }

  void rk4(FieldState& s, double dt) {
    const std::size_t n = grid_.size();
    const double t = s.t;
    rhs(s.u, s.p, t, model_, grid_, ku_[0], kp_[0]);
    for (int stage = 1; stage < 4; ++stage) {
      const double h = stage == 3 ? dt : 0.5 * dt;
      for (std::size_t i = 0; i < n; ++i) {
        a_[i] = s.u[i] + h * ku_[stage - 1][i];
        b_[i] = s.p[i] + h * kp_[stage - 1][i];
      }
      rhs(a_, b_, t + h, model_, grid_, ku_[stage], kp_[stage]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      s.u[i] += dt / 6.0 * (ku_[0][i] + 2.0 * ku_[1][i] + 2.0 * ku_[2][i] + ku_[3][i]);
      s.p[i] += dt / 6.0 * (kp_[0][i] + 2.0 * kp_[1][i] + 2.0 * kp_[2][i] + kp_[3][i]);
    }
    s.t = t + dt;
  }

  void check_finite(const FieldState& s) const {
    for (std::size_t i = 0; i < s.u.size(); ++i) {
      if (!std::isfinite(s.u[i]) || !std::isfinite(s.p[i]) || std::abs(s.u[i]) > kBlowUpThreshold)
        throw BlowUpError(s.t, "numerical blow-up at t=" + std::to_string(s.t) + " node " +
                                   std::to_string(i));
    }
  }

  const ModelSpec& model_;
  const Grid1D& grid_;
  std::vector<double> a_, b_;
  std::vector<std::vector<double>> ku_, kp_;
};

/// Single step; `dt` may be zero (identity) or negative (backward in time).
inline FieldState step(const FieldState& state, const ModelSpec& model, const Grid1D& grid, double dt,
                       Scheme scheme = Scheme::leapfrog) {
  FieldState out = state;
  Stepper(model, grid).advance(out, dt, scheme);
  return out;
}

struct Record {
  double t = 0.0;
  double energy = 0.0;
  double kink_x = std::numeric_limits<double>::quiet_NaN();
  double kink_c_est = std::numeric_limits<double>::quiet_NaN();
};

struct Observers {
  /// Level tracked for kink position (pi/2 for pi-kinks, pi for 2pi-kinks).
  std::optional<double> kink_level;
  /// Called at every recorded step with the current state.
  std::function<void(const FieldState&)> on_snapshot;
};

struct IntegrationResult {
  FieldState state;
  std::vector<Record> records;
};

/// Blow-up during integrate(); keeps the records gathered so far.
class IntegrationBlowUp : public BlowUpError {
 public:
  IntegrationBlowUp(const BlowUpError& e, std::vector<Record> partial)
      : BlowUpError(e.time(), e.what()), partial_(std::move(partial)) {}
  const std::vector<Record>& partial() const noexcept { return partial_; }

 private:
  std::vector<Record> partial_;
};

/// Repeated steps from state to plan.t_end. Records are taken at step 0,
/// every snapshot_stride steps and at the final step; none when no step is
/// taken.
inline IntegrationResult integrate(FieldState state, const ModelSpec& model, const Grid1D& grid,
                                   const IntegrationPlan& plan, const Observers& observers = {}) {
  require_on_grid(state, grid);
  IntegrationResult result;
  const std::size_t n = plan.steps();
  if (n == 0) {
    result.state = std::move(state);
    return result;
  }
  const double dt = plan.effective_dt();
  const double t0 = state.t;
  std::vector<double> ts, xs;

  auto record = [&](const FieldState& s) {
    Record r;
    r.t = s.t;
    r.energy = energy(s, model, grid);
    if (observers.kink_level) {
      r.kink_x = level_crossing(s.u, grid, *observers.kink_level, s.t);
      ts.push_back(s.t);
      xs.push_back(r.kink_x);
      r.kink_c_est = trailing_half_slope(ts, xs);
    }
    result.records.push_back(r);
    if (observers.on_snapshot) observers.on_snapshot(s);
  };

  Stepper stepper(model, grid);
  record(state);
  try {
    for (std::size_t k = 1; k <= n; ++k) {
      stepper.advance(state, dt, plan.scheme);
      state.t = k == n ? t0 + plan.t_end : t0 + static_cast<double>(k) * dt;
      if (k % plan.snapshot_stride == 0 || k == n) record(state);
    }
  } catch (const BlowUpError& e) {
    throw IntegrationBlowUp(e, std::move(result.records));
  }
  result.state = std::move(state);
  return result;
}

}  // namespace sgavg
