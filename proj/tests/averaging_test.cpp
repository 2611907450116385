#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sgavg/averaging.hpp"
#include "test_oracles.hpp"

using namespace sgavg;
constexpr double kPi = std::numbers::pi;

namespace {

Scenario small_scenario(ModelPair pair, double eps) {
  Scenario sc;
  sc.pair = pair;
  sc.epsilon = eps;
  sc.grid = Grid1D(-30.0, 30.0, 601);
  sc.t_end = 2.0;
  sc.dt_cap = 0.05;
  return sc;
}

}  // namespace

TEST(NearIdentity, ZeroEpsilonIsIdentity) {
  const TransformCoeffs c{build_stack(cosine_forcing(1.0))};
  const std::vector<double> xi{0.1, 1.0, 2.0}, eta{0.3, -0.2, 0.0};
  const auto [u, p] = near_identity_apply(xi, eta, 0.7, 0.0, c);
  EXPECT_EQ(u, xi);
  EXPECT_EQ(p, eta);
}

TEST(NearIdentity, IdentityWhereSecondAntiderivativeVanishes) {
  const TransformCoeffs c{build_stack(cosine_forcing(1.0))};
  const std::vector<double> xi{0.1, 1.0, 2.0}, eta{0.3, -0.2, 0.0};
  const auto [u, p] = near_identity_apply(xi, eta, kPi / 2, 0.1, c);
  for (std::size_t i = 0; i < xi.size(); ++i) {
    EXPECT_NEAR(u[i], xi[i], 1e-17);
    EXPECT_NEAR(p[i], eta[i], 1e-17);
  }
}

TEST(NearIdentity, WorkedExample) {
  // cos forcing at tau = 0: F2 = -1, so u = xi + e^2 sin xi.
  const TransformCoeffs c{build_stack(cosine_forcing(1.0))};
  const std::vector<double> xi{kPi / 2}, eta{0.0};
  const auto [u, p] = near_identity_apply(xi, eta, 0.0, 0.1, c);
  EXPECT_NEAR(u[0], kPi / 2 + 0.01, 1e-15);
  EXPECT_NEAR(p[0], 0.0, 1e-15);
  EXPECT_THROW(near_identity_apply(xi, std::vector<double>{}, 0.0, 0.1, c), ContractViolation);
}

TEST(TransformCoeffs, CorrectionsHaveZeroMeanAndSolveHomologicalEquations) {
  for (const PeriodicForcing& f : {cosine_forcing(1.0), square_forcing(1.0), series_forcing({1.0, 0.5}, {0.0, 0.2}, 3.0)}) {
    const TransformCoeffs c{build_stack(f)};
    const double T = f.period();
    for (double xi : {0.3, 1.1, 2.5}) {
      for (double eta : {-0.4, 0.9}) {
        EXPECT_NEAR(oracle::midpoint_mean([&](double t) { return c.v2(t, xi); }, T), 0.0, 1e-9);
        EXPECT_NEAR(oracle::midpoint_mean([&](double t) { return c.w2(t, xi, eta); }, T), 0.0, 1e-9);
        // d v2 / d tau = -f1 sin xi.
        const double t = 0.37 * T, h = 1e-5 * T;
        EXPECT_NEAR((c.v2(t + h, xi) - c.v2(t - h, xi)) / (2 * h), -c.stack.f_minus1(t) * std::sin(xi), 1e-8);
      }
    }
  }
}

TEST(TransformCoeffs, DriftCoefficients) {
  const ForcingStack st = build_stack(cosine_forcing(1.0));
  const TransformCoeffs c{st};
  for (double xi : {0.2, 1.3}) {
    EXPECT_EQ(TransformCoeffs::A2(xi, 0.5), 0.0);
    EXPECT_EQ(TransformCoeffs::B2(xi, 0.5), 0.0);
    // B3 is the mean of f1^2 sin xi cos xi, the averaged quadratic forcing.
    const double q = oracle::midpoint_mean(
        [&](double t) { return st.f_minus1(t) * st.f_minus1(t) * std::sin(xi) * std::cos(xi); }, st.period());
    EXPECT_NEAR(c.B3(xi), q, 1e-10);
  }
}

TEST(Pairs, NamesAndMismatches) {
  EXPECT_EQ(make_pair(Variant::full8, Variant::avg9), ModelPair::full8_avg9);
  EXPECT_EQ(parse_pair("full10-avg12"), ModelPair::full10_avg12);
  EXPECT_FALSE(parse_pair("full10-avg9").has_value());
  try {
    make_pair(Variant::full10, Variant::avg9);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "pair");
  }
  EXPECT_TRUE(supports_transform(ModelPair::full1_avg7));
  EXPECT_FALSE(supports_transform(ModelPair::full8_avg9));
}

TEST(FitScalingOrder, Examples) {
  const std::vector<std::pair<double, double>> pts{{0.1, 0.01}, {0.05, 0.0025}};
  EXPECT_NEAR(fit_scaling_order(pts), 2.0, 1e-12);
  EXPECT_THROW(fit_scaling_order(std::vector<std::pair<double, double>>{{0.1, 0.0}, {0.05, 0.1}}),
               ContractViolation);
  EXPECT_THROW(fit_scaling_order(std::vector<std::pair<double, double>>{{0.1, 0.1}}), ContractViolation);
  EXPECT_THROW(fit_scaling_order(std::vector<std::pair<double, double>>{{-0.1, 0.1}, {0.05, 0.1}}),
               ContractViolation);
}

TEST(FitScalingOrder, SyntheticPowerLaw) {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> ed(1e-3, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<double, double>> pts;
    for (int j = 0; j < 5; ++j) {
      const double e = ed(rng);
      pts.emplace_back(e, 3.0 * std::pow(e, 1.7));
    }
    EXPECT_NEAR(fit_scaling_order(pts), 1.7, 1e-10);
  }
}

TEST(Compare, ZeroForcingGivesZeroError) {
  for (ModelPair pair : {ModelPair::full1_avg7, ModelPair::full8_avg9, ModelPair::full13_avg13}) {
    Scenario sc = small_scenario(pair, 0.05);
    sc.forcing = zero_forcing();
    sc.init.amplitude = 0.8;
    const ErrorRecord r = compare_full_vs_averaged(sc);
    EXPECT_LE(r.error_max, 1e-10) << pair_name(pair);
  }
}

TEST(Compare, TransformRejectedForStrongDrive) {
  Scenario sc = small_scenario(ModelPair::full8_avg9, 0.05);
  sc.prep = Prep::transform;
  try {
    compare_full_vs_averaged(sc);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "prep");
  }
}

TEST(Compare, TransformPreparationBeatsRaw) {
  for (double eps : {0.1, 0.05}) {
    Scenario sc = small_scenario(ModelPair::full1_avg7, eps);
    const double raw = compare_full_vs_averaged(sc).error_max;
    sc.prep = Prep::transform;
    const double tr = compare_full_vs_averaged(sc).error_max;
    EXPECT_LE(tr, raw) << "eps=" << eps;
  }
}

TEST(Compare, Full8KinkErrorShrinksWithEpsilon) {
  Scenario sc;
  sc.init.kind = InitialData::Kind::kink;
  sc.grid = Grid1D::centered(40.0, 0.05);
  sc.t_end = 2.0;
  const std::vector<double> eps{0.05, 0.025};
  const auto recs = compare_eps_sweep(sc, eps);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_LT(recs[0].error_max, 0.5);
  EXPECT_LT(recs[1].error_max, recs[0].error_max);
  EXPECT_EQ(recs[1].epsilon, 0.025);
}

TEST(Compare, OversampleDoublingLeavesErrorUnchanged) {
  Scenario sc;
  sc.init.kind = InitialData::Kind::kink;
  sc.grid = Grid1D::centered(40.0, 0.05);
  sc.oversample = 64.0;
  const double a = compare_full_vs_averaged(sc).error_max;
  sc.oversample = 128.0;
  const double b = compare_full_vs_averaged(sc).error_max;
  EXPECT_LE(std::abs(a - b), 1e-4);
}

TEST(Compare, StrideControlsSeries) {
  Scenario sc = small_scenario(ModelPair::full1_avg7, 0.1);
  sc.snapshot_stride = 10;
  const ErrorRecord r = compare_full_vs_averaged(sc);
  EXPECT_EQ(r.t.front(), 0.0);
  EXPECT_EQ(r.t.back(), sc.t_end);
  EXPECT_EQ(r.error.back(), r.error_tend);
  EXPECT_EQ(r.t.size(), r.steps / 10 + 1 + (r.steps % 10 ? 1 : 0));
}
