#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sgavg/integrator.hpp"
#include "sgavg/kinks.hpp"

using namespace sgavg;
constexpr double kPi = std::numbers::pi;

namespace {

ModelSpec avg9(double delta = 1.0) { return ModelSpec::make(Variant::avg9, std::nullopt, std::nullopt, delta); }

FieldState pulse(const Grid1D& g, double amp = 1.0) {
  FieldState s = zero_state(g);
  for (std::size_t i = 0; i < g.size(); ++i) s.u[i] = amp * std::exp(-g.x(i) * g.x(i) / 2);
  return s;
}

FieldState run(FieldState s, const ModelSpec& m, const Grid1D& g, double dt, std::size_t n, Scheme sc) {
  Stepper st(m, g);
  for (std::size_t k = 0; k < n; ++k) st.advance(s, dt, sc);
  return s;
}

}  // namespace

TEST(Stepper, ZeroStepIsIdentity) {
  const Grid1D g(-10.0, 10.0, 201);
  const FieldState s = pulse(g);
  for (Scheme sc : {Scheme::leapfrog, Scheme::rk4}) {
    const FieldState r = step(s, avg9(), g, 0.0, sc);
    EXPECT_EQ(r.u, s.u);
    EXPECT_EQ(r.p, s.p);
    EXPECT_EQ(r.t, s.t);
  }
}

TEST(Stepper, FreeWaveFollowsDiscreteDispersion) {
  const std::size_t n = 128;
  const Grid1D g(0.0, 2 * kPi, n, Boundary::periodic);
  const double h = g.dx(), k = 2.0;
  const double w = 2.0 / h * std::sin(k * h / 2);
  FieldState s = zero_state(g);
  for (std::size_t i = 0; i < n; ++i) {
    s.u[i] = std::sin(k * g.x(i));
    s.p[i] = -w * std::cos(k * g.x(i));
  }
  const ModelSpec m = ModelSpec::make(Variant::free_wave);
  auto err = [&](double dt, std::size_t steps, Scheme sc) {
    const FieldState r = run(s, m, g, dt, steps, sc);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs(r.u[i] - std::sin(k * g.x(i) - w * r.t)));
    return e;
  };
  EXPECT_LT(err(h / 4, 1, Scheme::rk4), 1e-10);
  EXPECT_LT(err(h / 4, 100, Scheme::rk4), 1e-8);
  const double e1 = err(h / 2, 40, Scheme::leapfrog);
  const double e2 = err(h / 4, 80, Scheme::leapfrog);
  EXPECT_LT(e1, 1e-3);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.2);
}

TEST(Stepper, StaticKinkStaysPut) {
  // The sampled analytic kink is an equilibrium only up to O(dx^2): its center
  // does not move and the profile relaxes by an amount shrinking at order two.
  KinkParams p;
  std::vector<double> drift;
  for (double dx : {0.05, 0.025}) {
    const Grid1D g = Grid1D::centered(40.0, dx);
    const FieldState s0 = init_kink(g, p, Variant::avg9);
    const FieldState s = run(s0, avg9(), g, dx / 2, static_cast<std::size_t>(std::lround(10.0 / (dx / 2))),
                             Scheme::leapfrog);
    EXPECT_NEAR(level_crossing(s.u, g, kPi / 2), 0.0, 1e-6);
    drift.push_back(sup_norm_diff(s.u, s0.u));
  }
  EXPECT_LT(drift[0], 1e-4);
  EXPECT_NEAR(std::log2(drift[0] / drift[1]), 2.0, 0.2);
}

TEST(Stepper, LeapfrogIsTimeReversible) {
  const Grid1D g(-20.0, 20.0, 401);
  const ForcingStack st = build_stack(cosine_forcing(1.0));
  for (const ModelSpec& m : {avg9(), ModelSpec::make(Variant::full8, 0.1, st),
                             ModelSpec::make(Variant::full13, 0.1, st)}) {
    const double dt = std::min(g.dx() / 4, max_stable_dt(m, g));
    const FieldState s0 = pulse(g, 1.5);
    const FieldState fw = run(s0, m, g, dt, 400, Scheme::leapfrog);
    const FieldState back = run(fw, m, g, -dt, 400, Scheme::leapfrog);
    EXPECT_LT(sup_norm_diff(back, s0), 1e-8) << variant_name(m.variant());
  }
}

TEST(Stepper, LeapfrogAndRk4AgreeAtSecondOrder) {
  const Grid1D g(-20.0, 20.0, 401);
  const ForcingStack st = build_stack(cosine_forcing(1.0));
  const std::vector<ModelSpec> models{
      ModelSpec::make(Variant::avg7, 0.1, std::nullopt, 0.5), avg9(),
      ModelSpec::make(Variant::avg12, std::nullopt, std::nullopt, 1.0),
      ModelSpec::make(Variant::avg13, 0.2, std::nullopt, 1.0), ModelSpec::make(Variant::free_wave),
      ModelSpec::make(Variant::full1, 0.1, st), ModelSpec::make(Variant::full8, 0.1, st),
      ModelSpec::make(Variant::full10, 0.1, st), ModelSpec::make(Variant::full13, 0.1, st)};
  for (const ModelSpec& m : models) {
    auto diff = [&](double dt) {
      const auto n = static_cast<std::size_t>(std::lround(1.0 / dt));
      return sup_norm_diff(run(pulse(g), m, g, dt, n, Scheme::leapfrog), run(pulse(g), m, g, dt, n, Scheme::rk4));
    };
    const double dt = 0.1 * 2 * kPi / 128;
    EXPECT_NEAR(std::log2(diff(dt) / diff(dt / 2)), 2.0, 0.25) << variant_name(m.variant());
  }
}

TEST(Stepper, EnergyErrorIsSecondOrderInDt) {
  KinkParams p;
  p.c = 0.5;
  const ModelSpec m = avg9();
  const Grid1D g = Grid1D::centered(50.0, 0.05);
  p.delta_shift = pi_kink_shift_for_center(-10.0, p, Variant::avg9);
  const FieldState s0 = init_kink(g, p, Variant::avg9);
  const double e0 = energy(s0, m, g);
  // Energy histories sampled at t = 0.4 k; the RK4 run at a tiny step is the
  // time-exact reference, which removes the dt-independent grid fluctuation.
  auto history = [&](double dt, Scheme sc) {
    const auto stride = static_cast<std::size_t>(std::lround(0.4 / dt));
    std::vector<double> e;
    for (const Record& rec : integrate(s0, m, g, make_plan(m, g, dt, 10.0, sc, stride)).records)
      e.push_back(rec.energy);
    return e;
  };
  const std::vector<double> ref = history(0.005, Scheme::rk4);
  auto deviation = [&](double dt) {
    const std::vector<double> e = history(dt, Scheme::leapfrog);
    double worst = 0.0;
    for (std::size_t k = 0; k < e.size(); ++k) worst = std::max(worst, std::abs(e[k] - ref[k]) / e0);
    return worst;
  };
  const double d1 = deviation(0.04), d2 = deviation(0.02);
  EXPECT_LT(d1, 1e-3);
  EXPECT_NEAR(std::log2(d1 / d2), 2.0, 0.3);
}

TEST(Stepper, ZeroForcingFull8IsFreeWave) {
  const Grid1D g(-20.0, 20.0, 401);
  const ModelSpec f8 = ModelSpec::make(Variant::full8, 0.1, build_stack(zero_forcing()));
  const ModelSpec fw = ModelSpec::make(Variant::free_wave);
  for (Scheme sc : {Scheme::leapfrog, Scheme::rk4}) {
    const FieldState a = run(pulse(g), f8, g, 0.01, 300, sc);
    const FieldState b = run(pulse(g), fw, g, 0.01, 300, sc);
    EXPECT_LE(sup_norm_diff(a, b), 1e-12);
  }
}

TEST(Plan, RejectsInadmissibleSteps) {
  const Grid1D g(-10.0, 10.0, 201);
  auto field_of = [](auto fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("none");
  };
  const ModelSpec m = avg9();
  EXPECT_EQ(field_of([&] { make_plan(m, g, 0.2, 1.0); }), "dt");
  EXPECT_EQ(field_of([&] { make_plan(m, g, 0.0, 1.0); }), "dt");
  EXPECT_EQ(field_of([&] { make_plan(m, g, 0.05, -1.0); }), "t_end");
  EXPECT_EQ(field_of([&] { make_plan(m, g, 0.05, 1.0, Scheme::leapfrog, 0); }), "snapshot_stride");
  const ModelSpec d = ModelSpec::make(Variant::full8, 0.05, build_stack(cosine_forcing(1.0)));
  EXPECT_EQ(field_of([&] { make_plan(d, g, 0.05, 1.0); }), "dt");
  EXPECT_EQ(field_of([&] { make_plan(d, g, 0.05 * 2 * kPi / 64, 1.0); }), "none");
}

TEST(Integrate, ZeroDurationReturnsInput) {
  const Grid1D g(-10.0, 10.0, 201);
  const FieldState s = pulse(g);
  const IntegrationResult r = integrate(s, avg9(), g, make_plan(avg9(), g, 0.05, 0.0));
  EXPECT_TRUE(r.records.empty());
  EXPECT_EQ(r.state.u, s.u);
  EXPECT_EQ(r.state.t, 0.0);
}

TEST(Integrate, RecordsAtStrideAndFinalStep) {
  const Grid1D g(-10.0, 10.0, 201);
  const IntegrationResult r = integrate(pulse(g), avg9(), g, make_plan(avg9(), g, 0.05, 1.0, Scheme::leapfrog, 7));
  ASSERT_EQ(r.records.size(), 1u + 2u + 1u);
  EXPECT_EQ(r.records.front().t, 0.0);
  EXPECT_NEAR(r.records[1].t, 0.35, 1e-12);
  EXPECT_EQ(r.records.back().t, 1.0);
  EXPECT_EQ(r.state.t, 1.0);
}

TEST(Integrate, BlowUpKeepsPartialRecords) {
  const Grid1D g(-10.0, 10.0, 201);
  const ModelSpec m = ModelSpec::make(Variant::full8, 0.05, build_stack(cosine_forcing(1e6)));
  try {
    integrate(pulse(g), m, g, auto_plan(m, g, 5.0, Scheme::leapfrog, 1.0, 1));
    FAIL() << "expected blow-up";
  } catch (const IntegrationBlowUp& e) {
    EXPECT_FALSE(e.partial().empty());
    EXPECT_GT(e.time(), 0.0);
  }
}
