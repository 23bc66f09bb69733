#include <algorithm>
#include <numeric>

#include <gtest/gtest.h>

#include "fringemag/errors.hpp"
#include "fringemag/species.hpp"
#include "oracles.hpp"

using namespace fringemag;

namespace {

// Moment projection (Bohr magnetons) of each hyperfine level: -m_F g for the
// lower level, +m_F g for the upper one.
double table_moment(Isotope isotope, int F, int m_F) {
  switch (isotope) {
    case Isotope::Cs133:
      return (F == 3 ? -1.0 : 1.0) * m_F / 4.0;
    case Isotope::Rb85:
      return (F == 2 ? -1.0 : 1.0) * m_F / 3.0;
    case Isotope::Rb87:
      return (F == 1 ? -1.0 : 1.0) * m_F / 2.0;
  }
  return 0.0;
}

}  // namespace

class ManifoldTest : public ::testing::TestWithParam<std::pair<Isotope, int>> {};

TEST_P(ManifoldTest, MatchesLevelTable) {
  const auto [isotope, expected_size] = GetParam();
  const HyperfineManifold m = builtin_manifold(isotope);
  ASSERT_EQ(m.size(), expected_size);
  for (const auto& s : m.states) {
    EXPECT_LE(std::abs(s.m_F), s.F);
    EXPECT_DOUBLE_EQ(s.mu_z, table_moment(isotope, s.F, s.m_F)) << s.F << " " << s.m_F;
  }
}

TEST_P(ManifoldTest, SymmetricUnderMirroring) {
  const HyperfineManifold m = builtin_manifold(GetParam().first);
  double total = 0.0;
  for (const auto& s : m.states) {
    total += s.mu_z;
    const auto mirror = std::find_if(m.states.begin(), m.states.end(),
                                     [&](const auto& t) { return t.F == s.F && t.m_F == -s.m_F; });
    ASSERT_NE(mirror, m.states.end());
    EXPECT_DOUBLE_EQ(mirror->mu_z, -s.mu_z);
  }
  EXPECT_NEAR(total, 0.0, 1e-15);
}

TEST_P(ManifoldTest, AsymptoteIsTwoZeroStates) {
  const auto [isotope, size] = GetParam();
  EXPECT_DOUBLE_EQ(asymptote_fraction(builtin_manifold(isotope)), 2.0 / size);
}

INSTANTIATE_TEST_SUITE_P(Isotopes, ManifoldTest,
                         ::testing::Values(std::pair{Isotope::Cs133, 16},
                                           std::pair{Isotope::Rb85, 12},
                                           std::pair{Isotope::Rb87, 8}));

TEST(Manifold, CesiumLargestMomentIsOneBohrMagneton) {
  const auto m = builtin_manifold("CS133");
  double largest = 0.0;
  for (const auto& s : m.states) largest = std::max(largest, std::abs(s.mu_z));
  EXPECT_DOUBLE_EQ(largest, 1.0);
}

TEST(Manifold, UnknownIsotopeRejected) { EXPECT_THROW(builtin_manifold("na23"), DomainError); }

TEST(Manifold, NoZeroStatesGivesZeroAsymptote) {
  HyperfineManifold m;
  m.states = {{1, 1, 0.5}, {1, -1, -0.5}};
  EXPECT_EQ(asymptote_fraction(m), 0.0);
}

TEST(Rotor, MostPopulatedLevelMatchesScan) {
  EXPECT_NEAR(r_max(0.0028, 870.0), 329, 1);
  for (const double B : {0.0019, 0.0028, 0.05, 0.3, 1.9}) {
    for (const double T : {5.0, 77.0, 300.0, 870.0}) {
      EXPECT_EQ(r_max(B, T), oracle::most_populated_level(B, T)) << B << " cm^-1, " << T << " K";
    }
  }
}

TEST(Rotor, ColdRotorSitsInLowestLevels) {
  EXPECT_EQ(r_max(0.0028, 0.002), 0);
  EXPECT_EQ(r_max(0.0028, 0.01), oracle::most_populated_level(0.0028, 0.01));
}

TEST(Rotor, MostPopulatedLevelRisesWithTemperature) {
  int previous = 0;
  for (double T = 10.0; T < 2000.0; T *= 1.3) {
    const int R = r_max(0.0028, T);
    EXPECT_GE(R, previous);
    previous = R;
  }
}

TEST(Rotor, RejectsNonPositiveArguments) {
  EXPECT_THROW(r_max(0.0, 300.0), DomainError);
  EXPECT_THROW(r_max(0.0028, -1.0), DomainError);
}

TEST(Rotor, PopulationsAreNormalizedAndPeakAtRMax) {
  const auto w = rotational_populations(0.0028, 870.0);
  EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-12);
  EXPECT_EQ(std::max_element(w.begin(), w.end()) - w.begin(), r_max(0.0028, 870.0));
}

TEST(Rotor, C60ProjectionAtRMax) {
  const RotorSpecies c60 = builtin_rotor("c60");
  EXPECT_NEAR(mu_rot_projection(329, 0, 329, c60), -4.6389, 1e-12);
  EXPECT_EQ(mu_rot_projection(0, 0, 329, c60), 0.0);
}

TEST(Rotor, ProjectionIsOddInM) {
  const RotorSpecies c70 = builtin_rotor("c70");
  for (const double M : {1.0, 17.0, 250.0}) {
    EXPECT_DOUBLE_EQ(mu_rot_projection(-M, 40, 300, c70), -mu_rot_projection(M, 40, 300, c70));
  }
}

TEST(Rotor, ProjectionInterpolatesBetweenTensorComponents) {
  const RotorSpecies c70 = builtin_rotor("c70");
  const double R = 120.0;
  EXPECT_DOUBLE_EQ(mu_rot_projection(50, 0, R, c70), 50 * c70.g_xx);
  const double share = R / (R + 1.0);
  EXPECT_NEAR(mu_rot_projection(50, R, R, c70), 50 * ((1.0 - share) * c70.g_xx + share * c70.g_zz),
              1e-14);
}

TEST(Velocity, GaussianPeakDensity) {
  const VelocityDistribution g(Gaussian{694.0, 23.0});
  EXPECT_NEAR(g.pdf(694.0), 1.0 / (23.0 * std::sqrt(2.0 * oracle::kPi)), 1e-15);
  EXPECT_NEAR(g.pdf(694.0), oracle::gaussian_pdf(694.0, 694.0, 23.0), 1e-15);
}

TEST(Velocity, SkewNormalIsTruncatedAndRenormalized) {
  const SkewNormal params{228.0, 118.0, 4.4};
  const VelocityDistribution d(params);
  const auto [lo, hi] = d.support();
  EXPECT_GE(lo, 0.0);
  const double norm = oracle::simpson([&](double v) { return d.pdf(v); }, 0.0, hi + 500.0, 200000);
  EXPECT_NEAR(norm, 1.0, 1e-9);
  const double positive_mass = oracle::simpson(
      [&](double v) { return oracle::skew_normal_pdf(v, 228.0, 118.0, 4.4); }, 0.0, 3000.0, 200000);
  for (const double v : {50.0, 228.0, 400.0, 800.0}) {
    EXPECT_NEAR(d.pdf(v), oracle::skew_normal_pdf(v, 228.0, 118.0, 4.4) / positive_mass, 1e-12);
  }
  EXPECT_EQ(d.pdf(-1.0), 0.0);
}

TEST(Velocity, SupportHoldsAlmostAllMass) {
  for (const VelocityDistribution& d : {VelocityDistribution(SkewNormal{290.0, 171.0, 2.1}),
                                        VelocityDistribution(SkewNormal{425.0, 220.0, 1.7}),
                                        VelocityDistribution(Gaussian{175.0, 50.0})}) {
    const auto [lo, hi] = d.support();
    const double inside =
        oracle::simpson([&](double v) { return d.pdf(v); }, std::max(lo, 1e-9), hi, 100000);
    EXPECT_GT(inside, 1.0 - 1e-8);
  }
}

TEST(Velocity, HistogramDensity) {
  const VelocityDistribution d(Empirical{{100.0, 200.0, 300.0}, {1.0, 3.0}});
  EXPECT_DOUBLE_EQ(d.pdf(150.0), 0.0025);
  EXPECT_DOUBLE_EQ(d.pdf(250.0), 0.0075);
  EXPECT_EQ(d.pdf(350.0), 0.0);
  EXPECT_EQ(d.breakpoints(), std::vector<double>{200.0});
}

TEST(Velocity, DiscreteAtomsAreNormalized) {
  const VelocityDistribution d(Discrete{{200.0, 400.0}, {1.0, 3.0}});
  ASSERT_TRUE(d.is_discrete());
  const auto atoms = d.atoms();
  ASSERT_EQ(atoms.size(), 2u);
  EXPECT_DOUBLE_EQ(atoms[0].second, 0.25);
  EXPECT_DOUBLE_EQ(atoms[1].second, 0.75);
}

TEST(Velocity, InvalidParametersRejected) {
  EXPECT_THROW(VelocityDistribution(Gaussian{100.0, 0.0}), DomainError);
  EXPECT_THROW(VelocityDistribution(Empirical{{100.0, 50.0}, {1.0}}), DomainError);
  EXPECT_THROW(VelocityDistribution(Discrete{{-5.0}, {1.0}}), DomainError);
}

TEST(Species, BuiltinsValidate) {
  for (const char* name : {"cs133", "rb85", "rb87", "tempo", "c60"}) {
    EXPECT_NO_THROW(builtin_species(name).validate()) << name;
  }
  EXPECT_THROW(builtin_species("h2o"), DomainError);
}

TEST(Species, LangevinMomentScalesAsMuSquaredOverT) {
  const double mu = oracle::kBohrMagneton;
  const double base = langevin_mu_eff(mu, 0.5, 300.0);
  EXPECT_NEAR(base, mu * mu * 0.5 / (3.0 * oracle::kBoltzmann * 300.0), 1e-12 * base);
  EXPECT_NEAR(langevin_mu_eff(mu, 0.5, 600.0), base / 2.0, 1e-12 * base);
}
