#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "fringemag/errors.hpp"
#include "fringemag/fit.hpp"
#include "oracles.hpp"

using namespace fringemag;

namespace {

constexpr double kPeriod = 266e-9;

FringeScan sinusoid(int n, double c, double a, double theta, double periods = 2.0) {
  FringeScan scan;
  for (int i = 0; i < n; ++i) {
    const double x = periods * kPeriod * i / n;
    scan.positions.push_back(x);
    scan.counts.push_back(c + a * std::sin(2 * oracle::kPi * x / kPeriod + theta));
  }
  return scan;
}

FringeScan noisy_with_outliers(std::uint64_t seed, double outlier_fraction) {
  FringeScan scan = sinusoid(200, 100.0, 20.0, 0.3, 4.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (double& c : scan.counts) c += noise(rng);
  std::vector<std::size_t> index(scan.counts.size());
  std::iota(index.begin(), index.end(), 0);
  std::shuffle(index.begin(), index.end(), rng);
  const auto outliers = static_cast<std::size_t>(outlier_fraction * index.size());
  for (std::size_t k = 0; k < outliers; ++k) scan.counts[index[k]] += 10.0 * 20.0;
  return scan;
}

// One-sided TEMPO-like model on a direct C axis; cheap enough for many fits.
CurveModel tempo_model() {
  return CurveModel(builtin_species("tempo"), BeamGeometry{0.98, 266e-9, 0.15, 0.32},
                    [](double c) { return CPair{c, 0.0}; });
}

Dataset synthetic(const CurveModel& model, const ModelOverrides& truth, double v0,
                  double noise_sigma, std::uint64_t seed) {
  Dataset data;
  data.abscissa_label = "c_T_m";
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_sigma);
  for (int i = 0; i < 25; ++i) {
    const double c = 0.004 * i;
    data.abscissa.push_back(c);
    data.visibility.push_back(v0 * model.predict(c, truth) + (noise_sigma > 0 ? noise(rng) : 0.0));
    data.sigma.push_back(noise_sigma > 0 ? noise_sigma : 0.01);
  }
  return data;
}

}  // namespace

TEST(FringeFit, RecoversNoiselessSinusoid) {
  for (const bool robust : {false, true}) {
    const FringeFitResult r = fit_fringe(sinusoid(40, 100.0, 20.0, 0.3), robust);
    EXPECT_NEAR(r.offset, 100.0, 1e-9 * 100.0);
    EXPECT_NEAR(r.amplitude, 20.0, 1e-9 * 20.0);
    EXPECT_NEAR(r.phase, 0.3, 1e-9);
    EXPECT_NEAR(r.visibility, 0.2, 1e-9);
    EXPECT_TRUE(r.valid);
    EXPECT_FALSE(r.clamped);
  }
}

TEST(FringeFit, BisquareEqualsLeastSquaresWithoutOutliers) {
  const FringeScan scan = sinusoid(60, 250.0, 40.0, -1.2, 3.0);
  const FringeFitResult plain = fit_fringe(scan, false);
  const FringeFitResult robust = fit_fringe(scan, true);
  EXPECT_NEAR(robust.offset, plain.offset, 1e-8 * plain.offset);
  EXPECT_NEAR(robust.amplitude, plain.amplitude, 1e-8 * plain.amplitude);
  EXPECT_NEAR(robust.phase, plain.phase, 1e-8);
}

TEST(FringeFit, RobustAgainstOutliers) {
  const FringeScan scan = noisy_with_outliers(2024, 0.05);
  const FringeFitResult robust = fit_fringe(scan, true);
  EXPECT_LT(std::abs(robust.amplitude - 20.0) / 20.0, 0.02);
  int downweighted = 0;
  for (const double w : robust.weights) downweighted += w < 0.5;
  EXPECT_GE(downweighted, 10);
}

TEST(FringeFit, FlatScanHasNoSignificantAmplitude) {
  FringeScan scan = sinusoid(80, 100.0, 0.0, 0.0, 3.0);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 2.0);
  for (double& c : scan.counts) c += noise(rng);
  const FringeFitResult r = fit_fringe(scan, false);
  EXPECT_LT(r.amplitude, 4.0 * r.amplitude_se);
  EXPECT_LT(r.visibility, 0.05);
}

TEST(FringeFit, InvariantUnderCommonOffset) {
  const FringeScan base = noisy_with_outliers(99, 0.0);
  FringeScan shifted = base;
  for (double& c : shifted.counts) c += 37.0;
  shifted.dark_rate = 37.0;
  for (const bool robust : {false, true}) {
    const auto a = fit_fringe(base, robust);
    const auto b = fit_fringe(shifted, robust);
    EXPECT_NEAR(a.offset, b.offset, 1e-9 * a.offset);
    EXPECT_NEAR(a.amplitude, b.amplitude, 1e-9 * a.amplitude);
    EXPECT_NEAR(a.phase, b.phase, 1e-9);
  }
}

TEST(FringeFit, StandardErrorsMatchNoise) {
  // For n points spread uniformly over whole periods the offset error is
  // sigma / sqrt(n) and the amplitude error sigma sqrt(2 / n).
  std::vector<double> offsets, amplitudes;
  double offset_se = 0.0;
  double amplitude_se = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto r = fit_fringe(noisy_with_outliers(seed, 0.0), false);
    offsets.push_back(r.offset);
    amplitudes.push_back(r.amplitude);
    offset_se += r.offset_se / 200.0;
    amplitude_se += r.amplitude_se / 200.0;
  }
  EXPECT_NEAR(offset_se, 1.0 / std::sqrt(200.0), 0.01);
  EXPECT_NEAR(amplitude_se, std::sqrt(2.0 / 200.0), 0.01);
  auto spread = [](const std::vector<double>& x) {
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    double s = 0.0;
    for (const double v : x) s += (v - mean) * (v - mean);
    return std::sqrt(s / (x.size() - 1));
  };
  EXPECT_NEAR(spread(offsets), offset_se, 0.2 * offset_se);
  EXPECT_NEAR(spread(amplitudes), amplitude_se, 0.2 * amplitude_se);
}

TEST(FringeFit, RejectsDegenerateScans) {
  EXPECT_THROW(fit_fringe(sinusoid(5, 100, 20, 0.3)), DataError);
  FringeScan same = sinusoid(10, 100, 20, 0.3);
  std::fill(same.positions.begin(), same.positions.end(), 1e-7);
  EXPECT_THROW(fit_fringe(same), DataError);
  EXPECT_THROW(fit_fringe(sinusoid(10, 100, 20, 0.3, 0.5)), DataError);
  FringeScan ragged = sinusoid(10, 100, 20, 0.3);
  ragged.counts.pop_back();
  EXPECT_THROW(fit_fringe(ragged), DataError);
}

TEST(FringeFit, NegativeOffsetIsInvalid) {
  FringeScan scan = sinusoid(20, 10.0, 5.0, 0.0);
  scan.dark_rate = 30.0;
  const auto r = fit_fringe(scan, false);
  EXPECT_FALSE(r.valid);
  EXPECT_EQ(r.visibility, 0.0);
}

TEST(Normalization, RecoversV0FromPlateau) {
  Dataset data;
  for (int i = 0; i <= 90; ++i) {
    const double current = 0.05 * i;
    data.abscissa.push_back(current);
    data.visibility.push_back(current >= 4.0 ? 0.2 * 2.0 / 16.0 : 0.2 * (1.0 - current / 5.0));
    data.sigma.push_back(0.004);
  }
  const auto n = normalize_to_asymptote(data, builtin_manifold(Isotope::Cs133), {4.0, 4.5});
  EXPECT_NEAR(n.v0, 0.2, 1e-12);
  EXPECT_NEAR(n.data.visibility.front(), 1.0, 1e-12);
  EXPECT_NEAR(n.data.sigma.front(), 0.02, 1e-12);
}

TEST(Normalization, Errors) {
  Dataset data{"current_A", {0.0, 1.0, 4.2}, {0.3, 0.1, 0.0}, {0.01, 0.01, 0.01}};
  const auto cs = builtin_manifold(Isotope::Cs133);
  EXPECT_THROW(normalize_to_asymptote(data, cs, {5.0, 6.0}), DataError);
  EXPECT_THROW(normalize_to_asymptote(data, cs, {4.0, 4.5}), DataError);
  HyperfineManifold pair;
  pair.states = {{1, 1, 0.5}, {1, -1, -0.5}};
  EXPECT_THROW(normalize_to_asymptote(data, pair, {0.0, 1.0}), DomainError);
}

TEST(VisibilityFit, NoFreeParametersGivesFixedChi2) {
  const CurveModel model = tempo_model();
  Dataset data = synthetic(model, {}, 1.0, 0.0, 0);
  for (double& v : data.visibility) v += 0.003;
  FitOptions options;
  options.fixed.mu_eff = 0.1;
  const FitResult r = fit_visibility_params(data, model, options);
  double chi2 = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double res =
        (model.predict(data.abscissa[i], options.fixed) - data.visibility[i]) / data.sigma[i];
    chi2 += res * res;
  }
  EXPECT_NEAR(r.chi2, chi2, 1e-12 * chi2);
  EXPECT_TRUE(r.params.empty());
}

TEST(VisibilityFit, NoiselessRoundTrip) {
  const CurveModel model = tempo_model();
  ModelOverrides truth;
  truth.mu_eff = 0.1;
  const Dataset data = synthetic(model, truth, 1.0, 0.0, 0);
  for (const Optimizer optimizer : {Optimizer::NelderMead, Optimizer::GaussNewton}) {
    FitOptions options;
    options.free = {FitParam::MuEff};
    options.optimizer = optimizer;
    const FitResult r = fit_visibility_params(data, model, options);
    EXPECT_NEAR(r.value(FitParam::MuEff), 0.1, 1e-5);
    EXPECT_TRUE(r.converged);
    EXPECT_LT(r.chi2, 1e-6);
  }
}

TEST(VisibilityFit, TwoParametersWithNoise) {
  const CurveModel model = tempo_model();
  ModelOverrides truth;
  truth.mu_eff = 0.1;
  const Dataset data = synthetic(model, truth, 0.3, 0.005, 17);
  FitOptions options;
  options.free = {FitParam::MuEff, FitParam::V0};
  const FitResult r = fit_visibility_params(data, model, options);
  EXPECT_NEAR(r.value(FitParam::MuEff), 0.1, 4 * r.std_error(FitParam::MuEff));
  EXPECT_NEAR(r.value(FitParam::V0), 0.3, 4 * r.std_error(FitParam::V0));
  EXPECT_EQ(r.dof, 23);
  EXPECT_EQ(r.covariance.size(), 2u);
  EXPECT_NEAR(r.covariance[0][1], r.covariance[1][0], 1e-15);
}

TEST(VisibilityFit, Chi2HistoryNeverIncreases) {
  const CurveModel model = tempo_model();
  ModelOverrides truth;
  truth.mu_eff = 0.13;
  const Dataset data = synthetic(model, truth, 1.0, 0.01, 3);
  for (const Optimizer optimizer : {Optimizer::NelderMead, Optimizer::GaussNewton}) {
    FitOptions options;
    options.free = {FitParam::MuEff};
    options.optimizer = optimizer;
    const FitResult r = fit_visibility_params(data, model, options);
    ASSERT_FALSE(r.chi2_history.empty());
    for (std::size_t i = 1; i < r.chi2_history.size(); ++i) {
      EXPECT_LE(r.chi2_history[i], r.chi2_history[i - 1]);
    }
    EXPECT_DOUBLE_EQ(r.chi2_history.back(), r.chi2);
  }
}

TEST(VisibilityFit, OptimizersAgree) {
  const CurveModel model = tempo_model();
  ModelOverrides truth;
  truth.mu_eff = 0.08;
  const Dataset data = synthetic(model, truth, 1.0, 0.01, 8);
  FitOptions nm;
  nm.free = {FitParam::MuEff};
  FitOptions gn = nm;
  gn.optimizer = Optimizer::GaussNewton;
  const double a = fit_visibility_params(data, model, nm).value(FitParam::MuEff);
  const double b = fit_visibility_params(data, model, gn).value(FitParam::MuEff);
  EXPECT_NEAR(a, b, 1e-5 * a);
}

TEST(VisibilityFit, Errors) {
  const CurveModel model = tempo_model();
  Dataset tiny{"c", {0.01}, {0.5}, {0.01}};
  FitOptions options;
  options.free = {FitParam::MuEff};
  try {
    fit_visibility_params(tiny, model, options);
    FAIL() << "expected FitError";
  } catch (const FitError& e) {
    EXPECT_EQ(e.kind(), FitError::Kind::Underdetermined);
  }
  options.free = {FitParam::MuEff, FitParam::MuEff};
  EXPECT_THROW(fit_visibility_params(synthetic(model, {}, 1.0, 0.0, 0), model, options),
               DomainError);
}

TEST(VisibilityFit, BoundHitIsReported) {
  const CurveModel model = tempo_model();
  ModelOverrides truth;
  truth.mu_eff = 0.1;
  const Dataset data = synthetic(model, truth, 1.0, 0.0, 0);
  FitOptions options;
  options.free = {FitParam::MuEff};
  options.settings[FitParam::MuEff] = ParamSetting{0.02, 0.0, 0.05, 0.01};
  try {
    fit_visibility_params(data, model, options);
    FAIL() << "expected FitError";
  } catch (const FitError& e) {
    EXPECT_EQ(e.kind(), FitError::Kind::AtBound);
  }
  options.throw_on_failure = false;
  const FitResult r = fit_visibility_params(data, model, options);
  EXPECT_TRUE(r.at_bound);
  EXPECT_NEAR(r.value(FitParam::MuEff), 0.05, 1e-6);
}

TEST(Dataset, Validation) {
  EXPECT_THROW((Dataset{"c", {}, {}, {}}.validate()), DataError);
  EXPECT_THROW((Dataset{"c", {1.0}, {0.5}, {0.0}}.validate()), DataError);
  EXPECT_THROW((Dataset{"c", {1.0, 2.0}, {0.5}, {0.1}}.validate()), DataError);
}
