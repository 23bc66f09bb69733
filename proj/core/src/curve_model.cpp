#include "fringemag/curve_model.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "fringemag/errors.hpp"

namespace fringemag {

CFactorFn current_scaling(CPair per_amp) {
  return [per_amp](double current) {
    return CPair{std::abs(current) * per_amp.permanent, current * current * per_amp.induced};
  };
}

namespace {

void override_part(Response& part, const ModelOverrides& overrides) {
  if (auto* m = std::get_if<Magnetized>(&part.value); m && overrides.mu_eff) {
    m->mu_eff = *overrides.mu_eff;
  } else if (auto* d = std::get_if<Diamagnetic>(&part.value); d && overrides.chi_m) {
    d->chi_m = *overrides.chi_m;
  } else if (auto* c = std::get_if<Composite>(&part.value)) {
    for (auto& sub : c->parts) override_part(sub, overrides);
  }
}

}  // namespace

SpeciesModel apply_overrides(SpeciesModel species, const ModelOverrides& overrides) {
  override_part(species.response, overrides);
  return species;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
  }
  if (failure) std::rethrow_exception(failure);
}

CurveModel::CurveModel(SpeciesModel species, BeamGeometry geometry, CFactorFn c_of,
                       double background_gradient)
    : species_(std::move(species)),
      geometry_(geometry),
      c_of_(std::move(c_of)),
      background_gradient_(background_gradient) {
  if (!c_of_) throw DomainError("curve model needs a C-factor function");
  species_.validate();
  geometry_.validate();
}

void CurveModel::tabulate(std::span<const double> abscissa, int threads) {
  std::vector<CPair> values(abscissa.size());
  parallel_for(abscissa.size(), threads, [&](std::size_t i) { values[i] = c_of_(abscissa[i]); });
  for (std::size_t i = 0; i < abscissa.size(); ++i) table_[abscissa[i]] = values[i];
}

CPair CurveModel::c_factors(double abscissa) const {
  if (const auto it = table_.find(abscissa); it != table_.end()) return it->second;
  return c_of_(abscissa);
}

double CurveModel::predict(double abscissa, const ModelOverrides& overrides) const {
  return predict(c_factors(abscissa), overrides);
}

double CurveModel::predict(const CPair& c, const ModelOverrides& overrides) const {
  PhaseContext ctx;
  ctx.geometry = geometry_;
  ctx.c_permanent = c.permanent;
  ctx.c_induced = c.induced;
  ctx.c0 = background_c(geometry_, overrides.background_gradient.value_or(background_gradient_));
  ctx.species = apply_overrides(species_, overrides);
  ctx.amplitude = amplitude;
  ctx.quadrature = quadrature;
  return visibility(ctx, rotational);
}

VisibilityCurve CurveModel::sweep(std::span<const double> abscissa, const std::string& label,
                                  int threads, const ModelOverrides& overrides) const {
  if (abscissa.empty()) throw DomainError("sweep needs at least one abscissa value");
  VisibilityCurve curve;
  curve.abscissa_label = label;
  curve.abscissa.assign(abscissa.begin(), abscissa.end());
  curve.v_over_v0.resize(abscissa.size());
  curve.c_permanent.resize(abscissa.size());
  curve.c_induced.resize(abscissa.size());
  curve.model = describe(apply_overrides(species_, overrides).response);
  parallel_for(abscissa.size(), threads, [&](std::size_t i) {
    const CPair c = c_factors(abscissa[i]);
    curve.c_permanent[i] = c.permanent;
    curve.c_induced[i] = c.induced;
    curve.v_over_v0[i] = predict(c, overrides);
  });
  return curve;
}

}  // namespace fringemag
