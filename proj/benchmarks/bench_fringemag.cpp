#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "fringemag/beamline.hpp"
#include "fringemag/config.hpp"
#include "fringemag/fieldmodel.hpp"
#include "fringemag/fit.hpp"
#include "fringemag/recipes.hpp"
#include "fringemag/visibility.hpp"

using namespace fringemag;

namespace {

RunConfig config(const char* name) { return load_config(name); }

void BM_CoilField(benchmark::State& state) {
  const FieldSource coils = build_anti_helmholtz(CoilAssemblySpec{});
  const Vec3 p(0.008, 0.001, 0.02);
  for (auto _ : state) benchmark::DoNotOptimize(field(coils, p));
}
BENCHMARK(BM_CoilField);

void BM_CuboidField(benchmark::State& state) {
  CuboidMagnet m;
  m.half_extents = Vec3(0.005, 0.01, 0.01);
  m.magnetization = Vec3(1.3, 0.0, 0.0);
  m.center = Vec3(-0.01, -0.006, 0.0);
  const Vec3 p(0.0, 0.0, 0.004);
  for (auto _ : state) benchmark::DoNotOptimize(cuboid_field(m, p));
}
BENCHMARK(BM_CuboidField);

void BM_CoilCFactor(benchmark::State& state) {
  const Experiment cs(config("cs_coils"));
  const FieldSource source = cs.source_at(1.0);
  const Trajectory path = cs.trajectory(ForceKind::Permanent);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        c_factor(source, path, cs.config().geometry, ForceKind::Permanent).value);
  }
}
BENCHMARK(BM_CoilCFactor)->Unit(benchmark::kMillisecond);

void BM_VisibilityPoint(benchmark::State& state) {
  const CurveModel model =
      Experiment(config(state.range(0) ? "tempo_magnet" : "cs_coils")).curve_model();
  const CPair c = state.range(0) ? CPair{-0.05, 0.0} : CPair{2e-3, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(c, {}));
}
BENCHMARK(BM_VisibilityPoint)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_FitMuEff(benchmark::State& state) {
  const RunConfig tempo = config("tempo_magnet");
  CurveModel model = Experiment(tempo).curve_model();
  model.tabulate(tempo.sweep.values);
  ModelOverrides truth;
  truth.mu_eff = 0.1;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 0.01);
  Dataset data;
  data.abscissa = tempo.sweep.values;
  for (const double x : data.abscissa) {
    data.visibility.push_back(model.predict(x, truth) + noise(rng));
    data.sigma.push_back(0.01);
  }
  FitOptions options;
  options.free = {FitParam::MuEff};
  options.optimizer = state.range(0) ? Optimizer::GaussNewton : Optimizer::NelderMead;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_visibility_params(data, model, options).chi2);
  }
}
BENCHMARK(BM_FitMuEff)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
