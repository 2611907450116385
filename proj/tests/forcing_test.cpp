#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sgavg/forcing.hpp"
#include "test_oracles.hpp"

using namespace sgavg;
constexpr double kPi = std::numbers::pi;

TEST(Antiderivative, CosineBecomesSine) {
  const PeriodicForcing g = antiderivative_zero_mean(cosine_forcing(1.0));
  for (double t : {0.0, 0.3, 1.7, 4.0, 6.1}) EXPECT_NEAR(g(t), std::sin(t), 1e-15);
}

TEST(Antiderivative, SineBecomesMinusCosine) {
  const PeriodicForcing g = antiderivative_zero_mean(series_forcing({0.0}, {1.0}));
  for (double t : {0.0, 0.3, 1.7, 4.0, 6.1}) EXPECT_NEAR(g(t), -std::cos(t), 1e-15);
}

TEST(Antiderivative, TermwiseCoefficients) {
  const PeriodicForcing f = series_forcing({1.0, 0.0, 2.0}, {0.0, -3.0, 0.5}, 4.0);
  const PeriodicForcing g = antiderivative_zero_mean(f);
  const double w = 2.0 * kPi / 4.0;
  ASSERT_EQ(g.harmonics(), 3u);
  EXPECT_DOUBLE_EQ(g.sin_coeffs()[0], 1.0 / w);
  EXPECT_DOUBLE_EQ(g.cos_coeffs()[1], 3.0 / (2.0 * w));
  EXPECT_DOUBLE_EQ(g.sin_coeffs()[2], 2.0 / (3.0 * w));
  EXPECT_DOUBLE_EQ(g.cos_coeffs()[2], -0.5 / (3.0 * w));
}

TEST(Antiderivative, SquareWaveGivesTriangleOfPeakHalfPi) {
  const PeriodicForcing f = square_forcing(1.0);
  const PeriodicForcing g = antiderivative_zero_mean(f);
  EXPECT_EQ(g.exact_shape(), ExactShape::triangle);
  EXPECT_NEAR(g(kPi), kPi / 2, 1e-15);
  EXPECT_NEAR(g(0.0), -kPi / 2, 1e-15);

  // g' reproduces f at 1000 points away from the jumps.
  const double h = 1e-6;
  int checked = 0;
  for (int j = 0; j < 1000; ++j) {
    const double t = (j + 0.5) * 2.0 * kPi / 1000.0;
    if (std::abs(t) < 1e-3 || std::abs(t - kPi) < 1e-3 || std::abs(t - 2 * kPi) < 1e-3) continue;
    EXPECT_NEAR((g(t + h) - g(t - h)) / (2 * h), f(t), 1e-8) << "t=" << t;
    ++checked;
  }
  EXPECT_GT(checked, 990);
  EXPECT_NEAR(oracle::midpoint_mean([&](double t) { return g(t); }, 2 * kPi), 0.0, 1e-10);
}

TEST(Antiderivative, SeriesOfSquareWaveMatchesExactTriangle) {
  // The truncated series attached to the triangle converges to the exact shape.
  const PeriodicForcing g = antiderivative_zero_mean(square_forcing(1.0));
  for (double t : {0.5, 1.0, 2.0, 4.0, 5.5}) EXPECT_NEAR(g.series_value(t), g(t), 2e-2 / 64.0 * 4);
}

TEST(MeanSquare, SineIsHalf) {
  const PeriodicForcing g = series_forcing({0.0}, {1.0});
  EXPECT_DOUBLE_EQ(mean_square(g), 0.5);
  const double q = oracle::midpoint_mean([&](double t) { return g(t) * g(t); }, 2 * kPi);
  EXPECT_NEAR(q, 0.5, 1e-12);
  EXPECT_NEAR(mean_square_quadrature(g), 0.5, 1e-14);
}

TEST(MeanSquare, ZeroFunction) {
  EXPECT_EQ(mean_square(zero_forcing()), 0.0);
  EXPECT_EQ(mean_square_quadrature(zero_forcing()), 0.0);
}

TEST(MeanSquare, TriangleFromUnitSquareWave) {
  const PeriodicForcing g = antiderivative_zero_mean(square_forcing(1.0));
  const double q = oracle::midpoint_mean([&](double t) { return g(t) * g(t); }, 2 * kPi, 400000);
  EXPECT_NEAR(q, kPi * kPi / 12, 1e-10);
  EXPECT_NEAR(mean_square(g), q, 1e-10);
  EXPECT_NEAR(mean_square(g), 0.822467, 1e-6);
}

TEST(BuildStack, Cosine) {
  const ForcingStack s = build_stack(cosine_forcing(1.0));
  for (double t : {0.0, 1.0, 2.5, 5.0}) {
    EXPECT_NEAR(s.f_minus1(t), std::sin(t), 1e-15);
    EXPECT_NEAR(s.F_minus2(t), -std::cos(t), 1e-15);
  }
  EXPECT_DOUBLE_EQ(s.delta, 0.5);
}

TEST(BuildStack, AmplitudeFrequencySweep) {
  for (double A : {1.0, 2.0}) {
    for (double w : {1.0, 2.0}) {
      const double T = 2 * kPi / w;
      const ForcingStack s = build_stack(cosine_forcing(A, T));
      // Quadrature oracle of (A/w sin w tau)^2.
      const double q = oracle::midpoint_mean(
          [&](double t) { const double v = A / w * std::sin(w * t); return v * v; }, T);
      EXPECT_NEAR(q, A * A / (2 * w * w), 1e-12);
      EXPECT_NEAR(s.delta, q, 1e-12) << "A=" << A << " w=" << w;
    }
  }
}

TEST(BuildStack, ZeroSeries) {
  const ForcingStack s = build_stack(zero_forcing());
  EXPECT_EQ(s.delta, 0.0);
  EXPECT_EQ(s.f_minus1(1.0), 0.0);
}

TEST(BuildStack, InvariantReportPasses) {
  for (const PeriodicForcing& f : {cosine_forcing(1.0), square_forcing(1.0), square_forcing(2.0, 3.0),
                                   series_forcing({1.0, 0.3}, {0.0, -0.7}, 5.0)}) {
    for (const InvariantCheck& c : check_stack(build_stack(f))) EXPECT_TRUE(c.passed) << c.name << "=" << c.value;
  }
}

TEST(PeriodicForcing, RejectsBadPeriod) {
  EXPECT_THROW(PeriodicForcing(0.0, {1.0}, {}), ContractViolation);
  EXPECT_THROW(PeriodicForcing(-1.0, {1.0}, {}), ContractViolation);
  EXPECT_THROW(series_forcing({std::nan("")}, {}), ContractViolation);
}

namespace {

PeriodicForcing random_series(std::mt19937& rng) {
  std::uniform_int_distribution<int> kd(1, 16);
  std::uniform_real_distribution<double> td(0.5, 10.0);
  const int K = kd(rng);
  return series_forcing(oracle::random_vector(rng, K), oracle::random_vector(rng, K), td(rng));
}

}  // namespace

TEST(ForcingProperties, AntiderivativeHasZeroMean) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const PeriodicForcing g = antiderivative_zero_mean(random_series(rng));
    EXPECT_LE(std::abs(quad::periodic_mean([&](double t) { return g(t); }, g.period())), 1e-10);
  }
}

TEST(ForcingProperties, FiniteDifferenceDerivativeConvergesAtOrderTwo) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const PeriodicForcing f = random_series(rng);
    const PeriodicForcing g = antiderivative_zero_mean(f);
    auto err = [&](double h) {
      double e = 0.0;
      for (int j = 0; j < 64; ++j) {
        const double t = (j + 0.37) * f.period() / 64;
        e = std::max(e, std::abs((g(t + h) - g(t - h)) / (2 * h) - f(t)));
      }
      return e;
    };
    const double h = 1e-2 * f.period() / std::sqrt(static_cast<double>(f.harmonics()));
    const double order = std::log2(err(h) / err(h / 2));
    EXPECT_NEAR(order, 2.0, 0.2) << "trial " << trial;
  }
}

TEST(ForcingProperties, ExactSquareChainDerivativeAwayFromJumps) {
  const PeriodicForcing f = square_forcing(1.5, 3.0);
  const PeriodicForcing g = antiderivative_zero_mean(f);
  const PeriodicForcing G = antiderivative_zero_mean(g);
  for (int j = 0; j < 200; ++j) {
    const double t = (j + 0.5) * 3.0 / 200;
    if (std::abs(t - 1.5) < 1e-2 || t < 1e-2 || 3.0 - t < 1e-2) continue;
    EXPECT_NEAR((g(t + 1e-4) - g(t - 1e-4)) / 2e-4, f(t), 1e-9);
    EXPECT_NEAR((G(t + 1e-4) - G(t - 1e-4)) / 2e-4, g(t), 1e-8);
  }
}

TEST(ForcingProperties, DeltaScalesQuadratically) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> cd(-3.0, 3.0);
  for (int trial = 0; trial < 30; ++trial) {
    const PeriodicForcing f = random_series(rng);
    const double c = cd(rng);
    std::vector<double> a = f.cos_coeffs(), b = f.sin_coeffs();
    for (double& v : a) v *= c;
    for (double& v : b) v *= c;
    const double d1 = build_stack(f).delta;
    const double dc = build_stack(series_forcing(a, b, f.period())).delta;
    EXPECT_NEAR(dc, c * c * d1, 1e-12 * std::max(1.0, dc));
  }
}

TEST(ForcingProperties, ParsevalMatchesQuadrature) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const PeriodicForcing g = random_series(rng);
    EXPECT_NEAR(mean_square_parseval(g), mean_square_quadrature(g), 1e-8);
  }
}

TEST(ForcingProperties, Periodicity) {
  // Dyadic periods and sample points keep tau + T exact, so any mismatch
  // comes from the evaluator and not from rounding the argument.
  std::mt19937 rng(9);
  std::uniform_int_distribution<int> kd(1, 16), pd(-1, 3), jd(-256, 256);
  for (int trial = 0; trial < 20; ++trial) {
    const int K = kd(rng);
    const PeriodicForcing f = series_forcing(oracle::random_vector(rng, K), oracle::random_vector(rng, K),
                                             std::ldexp(1.0, pd(rng)));
    for (int j = 0; j < 20; ++j) {
      const double t = jd(rng) / 64.0;
      EXPECT_NEAR(f(t + f.period()), f(t), 1e-13);
    }
  }
  const PeriodicForcing sq = antiderivative_zero_mean(square_forcing(1.0));
  EXPECT_NEAR(sq(1.0 + 2 * kPi), sq(1.0), 1e-13);
}
