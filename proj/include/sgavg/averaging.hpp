#pragma once

// Near-identity transformation
//   u = xi  + e^2 v2(tau, xi),        v2 = -F_{-2}(tau) sin xi
//   p = eta + e^2 w2(tau, xi, eta),   w2 =  F_{-2}(tau) eta cos xi
// (truncated at second order) and the full-versus-averaged experiment harness.

#include <cmath>
#include <cstddef>
#include <future>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sgavg/errors.hpp"
#include "sgavg/field.hpp"
#include "sgavg/forcing.hpp"
#include "sgavg/integrator.hpp"
#include "sgavg/kinks.hpp"
#include "sgavg/models.hpp"

namespace sgavg {

struct TransformCoeffs {
  ForcingStack stack;

  double v2(double tau, double xi) const { return -stack.F_minus2(tau) * std::sin(xi); }
  double w2(double tau, double xi, double eta) const { return stack.F_minus2(tau) * eta * std::cos(xi); }

  // Averaged drift coefficients of the transformed system.
  static constexpr double A2(double, double) { return 0.0; }
  static constexpr double A3(double, double) { return 0.0; }
  static constexpr double B2(double, double) { return 0.0; }
  double B3(double xi) const { return 0.5 * stack.delta * std::sin(2.0 * xi); }
};

inline std::pair<std::vector<double>, std::vector<double>> near_identity_apply(
    std::span<const double> xi, std::span<const double> eta, double tau, double eps,
    const TransformCoeffs& coeffs) {
  if (xi.size() != eta.size()) throw ContractViolation("near_identity_apply: length mismatch");
  const double F2 = coeffs.stack.F_minus2(tau);
  const double e2 = eps * eps;
  std::vector<double> u(xi.size()), p(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) {
    u[i] = xi[i] - e2 * F2 * std::sin(xi[i]);
    p[i] = eta[i] + e2 * F2 * eta[i] * std::cos(xi[i]);
  }
  return {std::move(u), std::move(p)};
}

enum class ModelPair { full1_avg7, full8_avg9, full10_avg12, full13_avg13 };

inline constexpr std::string_view pair_name(ModelPair p) {
  switch (p) {
    case ModelPair::full1_avg7: return "full1-avg7";
    case ModelPair::full8_avg9: return "full8-avg9";
    case ModelPair::full10_avg12: return "full10-avg12";
    case ModelPair::full13_avg13: return "full13-avg13";
  }
  return "?";
}

inline std::pair<Variant, Variant> pair_variants(ModelPair p) {
  switch (p) {
    case ModelPair::full1_avg7: return {Variant::full1, Variant::avg7};
    case ModelPair::full8_avg9: return {Variant::full8, Variant::avg9};
    case ModelPair::full10_avg12: return {Variant::full10, Variant::avg12};
    case ModelPair::full13_avg13: return {Variant::full13, Variant::avg13};
  }
  return {Variant::full1, Variant::avg7};
}

/// Pair for (full, averaged); throws ConfigError for mismatches such as full10/avg9.
inline ModelPair make_pair(Variant full, Variant averaged) {
  for (ModelPair p : {ModelPair::full1_avg7, ModelPair::full8_avg9, ModelPair::full10_avg12,
                      ModelPair::full13_avg13})
    if (pair_variants(p) == std::pair{full, averaged}) return p;
  throw ConfigError("pair", "no averaging relation between " + std::string(variant_name(full)) + " and " +
                                std::string(variant_name(averaged)));
}

inline std::optional<ModelPair> parse_pair(std::string_view s) {
  for (ModelPair p : {ModelPair::full1_avg7, ModelPair::full8_avg9, ModelPair::full10_avg12,
                      ModelPair::full13_avg13})
    if (pair_name(p) == s) return p;
  return std::nullopt;
}

/// Whether the second-order near-identity transform applies (e-weak drive).
inline constexpr bool supports_transform(ModelPair p) {
  return p == ModelPair::full1_avg7 || p == ModelPair::full13_avg13;
}

enum class Prep { raw, transform };

inline std::optional<Prep> parse_prep(std::string_view s) {
  if (s == "raw") return Prep::raw;
  if (s == "transform") return Prep::transform;
  return std::nullopt;
}

/// Initial data on averaged variables (xi, eta).
struct InitialData {
  enum class Kind { kink, pulse } kind = Kind::pulse;
  KinkParams kink;          ///< c, delta_shift, dsg coefficients; Delta/epsilon filled from the scenario
  double amplitude = 1.0;   ///< pulse: xi = A exp(-((x - x0)/w)^2), eta = 0
  double width = 2.0;
  double center = 0.0;
};

inline FieldState initial_state(const InitialData& init, const Grid1D& grid, const ModelSpec& averaged) {
  if (init.kind == InitialData::Kind::pulse) {
    FieldState s = zero_state(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double z = (grid.x(i) - init.center) / init.width;
      s.u[i] = init.amplitude * std::exp(-z * z);
    }
    return s;
  }
  KinkParams k = init.kink;
  k.Delta = averaged.delta();
  k.epsilon = needs_epsilon(averaged.variant()) ? averaged.epsilon() : 1.0;
  return init_kink(grid, k, averaged.variant());
}

struct Scenario {
  ModelPair pair = ModelPair::full8_avg9;
  PeriodicForcing forcing = cosine_forcing(1.0);
  double epsilon = 0.05;
  Grid1D grid = Grid1D(-40.0, 40.0, 1601);
  double t_end = 5.0;
  double dt_cap = 0.025;
  double oversample = 64.0;
  Scheme scheme = Scheme::leapfrog;
  std::size_t snapshot_stride = 0;  ///< 0 means record only the error series endpoints
  Prep prep = Prep::raw;
  InitialData init;
  /// Optional per-step hook with (full state, averaged state).
  std::function<void(const FieldState&, const FieldState&)> on_snapshot;
};

struct ErrorRecord {
  double epsilon = 0.0;
  std::vector<double> t;
  std::vector<double> error;
  double error_tend = 0.0;
  double error_max = 0.0;  ///< max over every step of the sup-norm error
  std::size_t steps = 0;
  double dt = 0.0;
};

/// Integrates the driven model and its averaged partner side by side with the
/// same step. The error at time t is sup_x |u_full - ref|, where ref is xi for
/// raw initialization and the near-identity image of (xi, eta) at tau = t/e
/// for transform-prepared runs.
inline ErrorRecord compare_full_vs_averaged(const Scenario& sc) {
  if (sc.prep == Prep::transform && !supports_transform(sc.pair))
    throw ConfigError("prep", "transform preparation is defined for full1-avg7 and full13-avg13 only");
  const auto [fv, av] = pair_variants(sc.pair);
  const ForcingStack stack = build_stack(sc.forcing);
  const ModelSpec full = ModelSpec::make(fv, sc.epsilon, stack);
  const ModelSpec avg = ModelSpec::make(av, sc.epsilon, stack);
  const Grid1D& grid = sc.grid;
  const TransformCoeffs coeffs{stack};

  FieldState xi = initial_state(sc.init, grid, avg);
  FieldState u = xi;
  if (sc.prep == Prep::transform) std::tie(u.u, u.p) = near_identity_apply(xi.u, xi.p, 0.0, sc.epsilon, coeffs);

  const IntegrationPlan plan = auto_plan(full, grid, sc.t_end, sc.scheme, sc.dt_cap, 1, sc.oversample);
  const std::size_t n = plan.steps();
  const double dt = plan.effective_dt();

  ErrorRecord rec;
  rec.epsilon = sc.epsilon;
  rec.steps = n;
  rec.dt = dt;
  auto measure = [&](std::size_t k) {
    double e = 0.0;
    if (sc.prep == Prep::transform) {
      const auto ref = near_identity_apply(xi.u, xi.p, xi.t / sc.epsilon, sc.epsilon, coeffs);
      e = sup_norm_diff(u.u, ref.first);
    } else {
      e = sup_norm_diff(u.u, xi.u);
    }
    rec.error_max = std::max(rec.error_max, e);
    if (k == 0 || k == n || (sc.snapshot_stride != 0 && k % sc.snapshot_stride == 0)) {
      rec.t.push_back(xi.t);
      rec.error.push_back(e);
      if (sc.on_snapshot) sc.on_snapshot(u, xi);
    }
    return e;
  };

  Stepper full_stepper(full, grid);
  Stepper avg_stepper(avg, grid);
  rec.error_tend = measure(0);
  for (std::size_t k = 1; k <= n; ++k) {
    full_stepper.advance(u, dt, sc.scheme);
    avg_stepper.advance(xi, dt, sc.scheme);
    const double t = k == n ? sc.t_end : static_cast<double>(k) * dt;
    u.t = t;
    xi.t = t;
    rec.error_tend = measure(k);
  }
  return rec;
}

/// Least-squares slope of log(error) against log(eps).
inline double fit_scaling_order(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw ContractViolation("fit_scaling_order needs at least two points");
  std::vector<double> lx, ly;
  for (const auto& [eps, err] : points) {
    if (!(eps > 0.0) || !(err > 0.0)) throw ContractViolation("fit_scaling_order needs positive entries");
    lx.push_back(std::log(eps));
    ly.push_back(std::log(err));
  }
  return ls_slope(lx, ly);
}

/// Runs the scenario for every eps concurrently; results follow eps order.
inline std::vector<ErrorRecord> compare_eps_sweep(const Scenario& base, std::span<const double> eps_values) {
  std::vector<std::future<ErrorRecord>> jobs;
  for (double eps : eps_values) {
    jobs.push_back(std::async(std::launch::async, [base, eps] {
      Scenario sc = base;
      sc.epsilon = eps;
      return compare_full_vs_averaged(sc);
    }));
  }
  std::vector<ErrorRecord> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace sgavg
