#include <complex>
#include <vector>

#include <gtest/gtest.h>

#include "fringemag/errors.hpp"
#include "fringemag/quadrature.hpp"
#include "oracles.hpp"

using namespace fringemag;

TEST(Integrate, KnownIntegrals) {
  EXPECT_NEAR(integrate([](double x) { return std::sin(x); }, 0.0, oracle::kPi), 2.0, 1e-10);
  EXPECT_NEAR(integrate([](double x) { return std::exp(-x * x); }, -10.0, 10.0),
              std::sqrt(oracle::kPi), 1e-10);
  const auto z = integrate_complex([](double x) { return std::polar(1.0, x); }, 0.0, oracle::kPi);
  EXPECT_NEAR(z.real(), 0.0, 1e-10);
  EXPECT_NEAR(z.imag(), 2.0, 1e-10);
}

TEST(VelocityAverage, DiscreteIsWeightedSum) {
  const VelocityDistribution d(Discrete{{100.0, 300.0}, {1.0, 1.0}});
  EXPECT_DOUBLE_EQ(velocity_average(d, [](double v) { return v * v; }), 0.5 * (1e4 + 9e4));
}

TEST(VelocityAverage, MeanOfGaussian) {
  const VelocityDistribution d(Gaussian{400.0, 50.0});
  EXPECT_NEAR(velocity_average(d, [](double v) { return v; }), 400.0, 1e-6 * 400.0);
}

TEST(VelocityAverage, HistogramSplitsAtEdges) {
  const VelocityDistribution d(Empirical{{100.0, 200.0, 300.0}, {1.0, 3.0}});
  EXPECT_NEAR(velocity_average(d, [](double v) { return v; }), 0.25 * 150.0 + 0.75 * 250.0, 1e-9);
}

class PhaseAverageTest : public ::testing::TestWithParam<double> {};

// Each parameter is the largest phase (rad) at the mean velocity, covering
// both sides of the switch to the Fourier rule.
TEST_P(PhaseAverageTest, MatchesDenseSimpson) {
  const double mean = 300.0;
  const double sigma = 30.0;
  const double K = GetParam() * mean * mean;
  const std::vector<PhaseTerm> terms = {{0.3, K}, {0.5, -0.4 * K}, {0.2, 0.0}};
  const VelocityDistribution d(Gaussian{mean, sigma});
  const std::complex<double> got = phase_average(d, {}, terms);

  auto integrand = [&](double v, bool imag) {
    std::complex<double> sum = 0.0;
    for (const auto& t : terms) sum += t.weight * std::polar(1.0, t.K / (v * v));
    return oracle::gaussian_pdf(v, mean, sigma) * (imag ? sum.imag() : sum.real());
  };
  const int panels = 400000;
  const double re =
      oracle::simpson([&](double v) { return integrand(v, false); }, 100, 500, panels);
  const double im = oracle::simpson([&](double v) { return integrand(v, true); }, 100, 500, panels);
  EXPECT_NEAR(got.real(), re, 1e-6);
  EXPECT_NEAR(got.imag(), im, 1e-6);
}

INSTANTIATE_TEST_SUITE_P(Phases, PhaseAverageTest, ::testing::Values(0.3, 5.0, 50.0, 400.0));

TEST(PhaseAverage, ZeroPhaseIsTotalMass) {
  const VelocityDistribution d(SkewNormal{290.0, 171.0, 2.1});
  const auto z = phase_average(d, {}, 0.0);
  EXPECT_NEAR(z.real(), 1.0, 1e-6);
  EXPECT_EQ(z.imag(), 0.0);
}

TEST(PhaseAverage, ConjugatePhaseGivesConjugate) {
  const VelocityDistribution d(SkewNormal{290.0, 171.0, 2.1});
  const auto plus = phase_average(d, {}, 3e6);
  const auto minus = phase_average(d, {}, -3e6);
  EXPECT_NEAR(plus.real(), minus.real(), 1e-12);
  EXPECT_NEAR(plus.imag(), -minus.imag(), 1e-12);
}

TEST(PhaseAverage, DeltaBeamIsPurePhase) {
  const VelocityDistribution d(Discrete{{250.0}, {1.0}});
  const double K = 7.3e7;
  const auto z = phase_average(d, {}, K);
  EXPECT_NEAR(std::abs(z), 1.0, 1e-14);
  EXPECT_NEAR(std::arg(z), std::arg(std::polar(1.0, K / 62500.0)), 1e-9);
}

TEST(PhaseAverage, AmplitudeWeightsIntegrand) {
  const VelocityDistribution d(Gaussian{400.0, 40.0});
  const auto z = phase_average(d, [](double v) { return v / 1000.0; }, 0.0);
  EXPECT_NEAR(z.real(), 0.4, 1e-6);
}
