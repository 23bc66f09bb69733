#include "fringemag/recipes.hpp"

#include <algorithm>
#include <memory>

#include "fringemag/errors.hpp"

namespace fringemag {

std::optional<std::string> bundled_config_text(std::string_view name) {
  const auto& configs = bundled_configs();
  for (const std::string& key : {std::string(name), std::string(name) + ".cfg"}) {
    if (const auto it = configs.find(key); it != configs.end()) return it->second;
  }
  return std::nullopt;
}

namespace {

bool responds(const Response& response, bool induced) {
  return std::visit(
      [&](const auto& part) {
        using T = std::decay_t<decltype(part)>;
        if constexpr (std::is_same_v<T, Composite>) {
          return std::any_of(part.parts.begin(), part.parts.end(),
                             [&](const Response& sub) { return responds(sub, induced); });
        } else {
          return std::is_same_v<T, Diamagnetic> == induced;
        }
      },
      response.value);
}

}  // namespace

Experiment::Experiment(RunConfig config, CFactorOptions c_options)
    : config_(std::move(config)), c_options_(c_options) {
  config_.validate();
  needs_permanent_ = responds(config_.species.response, false);
  needs_induced_ = responds(config_.species.response, true);
  if (config_.source == SourceKind::Coils) per_amp_ = integrate_c(source_at(1.0));
}

FieldSource Experiment::source_at(double abscissa) const {
  switch (config_.source) {
    case SourceKind::Coils: {
      CoilAssemblySpec spec = config_.coils;
      spec.current = abscissa;
      return build_anti_helmholtz(spec);
    }
    case SourceKind::Magnet: {
      FieldSource source;
      source.cuboids.push_back(config_.magnet.at_distance(abscissa));
      return source;
    }
    case SourceKind::Background:
      break;
  }
  throw DomainError("a pure background gradient has no field map");
}

Trajectory Experiment::trajectory(ForceKind kind) const {
  const BeamGeometry& g =
      kind == ForceKind::Permanent ? config_.geometry : config_.induced_geometry;
  return Trajectory::centered(config_.trajectory_midpoint, g.L1, config_.tilt);
}

CPair Experiment::integrate_c(const FieldSource& source) const {
  CPair c;
  if (needs_permanent_) {
    c.permanent = c_factor(source, trajectory(ForceKind::Permanent), config_.geometry,
                           ForceKind::Permanent, c_options_)
                      .value;
  }
  if (needs_induced_) {
    c.induced = c_factor(source, trajectory(ForceKind::Induced), config_.induced_geometry,
                         ForceKind::Induced, c_options_)
                    .value;
  }
  return c;
}

CPair Experiment::c_factors(double abscissa) const {
  switch (config_.source) {
    case SourceKind::Coils:
      return current_scaling(per_amp_)(abscissa);
    case SourceKind::Magnet:
      return integrate_c(source_at(abscissa));
    case SourceKind::Background:
      return {background_c(config_.geometry, abscissa), 0.0};
  }
  return {};
}

CurveModel Experiment::curve_model() const {
  auto self = std::make_shared<const Experiment>(*this);
  CurveModel model(
      config_.species, config_.geometry,
      [self](double abscissa) { return self->c_factors(abscissa); }, config_.background_gradient);
  model.rotational = config_.rotational;
  return model;
}

VisibilityCurve Experiment::sweep(int threads) const {
  CurveModel model = curve_model();
  model.tabulate(config_.sweep.values, threads);
  VisibilityCurve curve = model.sweep(config_.sweep.values, config_.sweep.label(), threads);
  return curve;
}

std::vector<ProfileSample> Experiment::profile(double abscissa, int samples) const {
  return sample_profile(source_at(abscissa), trajectory(ForceKind::Permanent), samples,
                        c_options_.field);
}

namespace {

struct FigureRecipe {
  std::string id;
  std::vector<std::pair<std::string, std::string>> curves;  // (name, bundled config)
};

const std::vector<FigureRecipe>& recipes() {
  static const std::vector<FigureRecipe> table = {
      {"fig2-cs", {{"fig2_cs_380", "cs_coils.cfg"}, {"fig2_cs_270", "cs_coils_270.cfg"}}},
      {"fig3-tempo", {{"fig3_tempo", "tempo_magnet.cfg"}}},
      {"fig4-fullerenes",
       {{"fig4_c60", "c60_magnet.cfg"},
        {"fig4_c70", "c70_magnet.cfg"},
        {"fig4_c69c13", "c69c13_magnet.cfg"}}},
      {"figS4-rb", {{"figS4_rb85", "rb85_coils.cfg"}, {"figS4_rb87", "rb87_coils.cfg"}}},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const auto& r : recipes()) out.push_back(r.id);
    return out;
  }();
  return ids;
}

Reproduction reproduce(std::string_view figure_id, int threads) {
  const auto it = std::find_if(recipes().begin(), recipes().end(),
                               [&](const FigureRecipe& r) { return r.id == figure_id; });
  if (it == recipes().end()) {
    throw DomainError("unknown figure '" + std::string(figure_id) + "'");
  }
  Reproduction out;
  out.figure = it->id;
  for (const auto& [name, file] : it->curves) {
    const auto text = bundled_config_text(file);
    if (!text) throw IoError("bundled config '" + file + "' is missing from this build");
    const Experiment experiment(parse_config(*text));
    out.curves.push_back({name, experiment.sweep(threads)});
  }
  return out;
}

}  // namespace fringemag
