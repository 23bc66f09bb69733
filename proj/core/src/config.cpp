#include "fringemag/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <yaml-cpp/yaml.h>

#include "fringemag/constants.hpp"
#include "fringemag/errors.hpp"
#include "fringemag/recipes.hpp"
#include "fringemag/units.hpp"

namespace fringemag {

CuboidMagnet MagnetConfig::at_distance(double distance) const {
  CuboidMagnet m;
  m.half_extents = 0.5 * size;
  m.magnetization = remanence * direction.normalized();
  m.center = Vec3(-(distance + m.half_extents.x()), vertical_offset, along_beam);
  return m;
}

std::string SweepConfig::label() const {
  switch (kind) {
    case SweepKind::Current:
      return "current_A";
    case SweepKind::Distance:
      return "distance_m";
    case SweepKind::Gradient:
      return "gradient_T_per_m";
  }
  return "abscissa";
}

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::Coils:
      return "coils";
    case SourceKind::Magnet:
      return "magnet";
    case SourceKind::Background:
      return "background";
  }
  return "unknown";
}

std::string_view to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::Current:
      return "current";
    case SweepKind::Distance:
      return "distance";
    case SweepKind::Gradient:
      return "gradient";
  }
  return "unknown";
}

namespace {

using units::Dimension;

[[noreturn]] void fail(const YAML::Node& node, const std::string& message) {
  const YAML::Mark mark = node.Mark();
  if (mark.is_null()) throw ConfigError(message);
  throw ConfigError(message, mark.line + 1, mark.column + 1);
}

void require_map(const YAML::Node& node, const std::string& field) {
  if (!node.IsMap()) fail(node, "'" + field + "' must be a mapping");
}

void check_keys(const YAML::Node& node, const std::string& field,
                std::initializer_list<std::string_view> allowed) {
  require_map(node, field);
  for (const auto& entry : node) {
    const auto key = entry.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(entry.first, "unknown key '" + key + "' in '" + field + "'");
    }
  }
}

YAML::Node required(const YAML::Node& parent, const std::string& key, const std::string& field) {
  const YAML::Node node = parent[key];
  if (!node) fail(parent, "'" + field + "' is missing '" + key + "'");
  return node;
}

std::string scalar(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) fail(node, "'" + field + "' must be a scalar");
  return node.Scalar();
}

double quantity(const YAML::Node& node, Dimension dim, const std::string& field) {
  const std::string text = scalar(node, field);
  try {
    const double value = units::parse_quantity(text, dim);
    if (!std::isfinite(value)) fail(node, "'" + field + "' is not finite");
    return value;
  } catch (const std::invalid_argument& e) {
    fail(node, "'" + field + "': " + e.what());
  }
}

double number(const YAML::Node& node, const std::string& field) {
  return quantity(node, Dimension::Dimensionless, field);
}

int integer(const YAML::Node& node, const std::string& field) {
  const double value = number(node, field);
  if (value != std::floor(value) || std::abs(value) > 1e9) {
    fail(node, "'" + field + "' must be an integer");
  }
  return static_cast<int>(value);
}

bool boolean(const YAML::Node& node, const std::string& field) {
  const std::string text = scalar(node, field);
  if (text == "true") return true;
  if (text == "false") return false;
  fail(node, "'" + field + "' must be true or false");
}

std::vector<double> quantity_list(const YAML::Node& node, Dimension dim, const std::string& field) {
  if (!node.IsSequence()) fail(node, "'" + field + "' must be a list");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(quantity(node[i], dim, field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Vec3 vector3(const YAML::Node& node, Dimension dim, const std::string& field) {
  const auto values = quantity_list(node, dim, field);
  if (values.size() != 3) fail(node, "'" + field + "' must have three components");
  return Vec3(values[0], values[1], values[2]);
}

template <class Enum>
Enum choice(const YAML::Node& node, const std::string& field,
            std::initializer_list<std::pair<std::string_view, Enum>> options) {
  const std::string text = scalar(node, field);
  for (const auto& [name, value] : options) {
    if (name == text) return value;
  }
  std::string known;
  for (const auto& option : options)
    known += (known.empty() ? "" : ", ") + std::string(option.first);
  fail(node, "'" + field + "' must be one of: " + known);
}

// ---------------------------------------------------------------------------

void parse_coils(const YAML::Node& node, CoilAssemblySpec& coils) {
  check_keys(node, "source.coils",
             {"radius", "wire_diameter", "turns_per_layer", "layers", "separation", "center",
              "axis", "polarity"});
  if (node["radius"])
    coils.nominal_radius = quantity(node["radius"], Dimension::Length, "source.coils.radius");
  if (node["wire_diameter"]) {
    coils.wire_diameter =
        quantity(node["wire_diameter"], Dimension::Length, "source.coils.wire_diameter");
  }
  if (node["turns_per_layer"]) {
    coils.turns_per_layer = integer(node["turns_per_layer"], "source.coils.turns_per_layer");
  }
  if (node["layers"]) coils.layers = integer(node["layers"], "source.coils.layers");
  if (node["separation"]) {
    coils.center_separation =
        quantity(node["separation"], Dimension::Length, "source.coils.separation");
  }
  if (node["center"])
    coils.center = vector3(node["center"], Dimension::Length, "source.coils.center");
  if (node["axis"])
    coils.axis = vector3(node["axis"], Dimension::Dimensionless, "source.coils.axis");
  if (node["polarity"]) {
    coils.polarity = choice<Polarity>(
        node["polarity"], "source.coils.polarity",
        {{"anti_helmholtz", Polarity::AntiHelmholtz}, {"helmholtz", Polarity::Helmholtz}});
  }
  if (!(coils.axis.norm() > 0.0)) fail(node, "'source.coils.axis' must be non-zero");
  coils.axis.normalize();
}

void parse_magnet(const YAML::Node& node, MagnetConfig& magnet) {
  check_keys(node, "source.magnet",
             {"size", "remanence", "direction", "vertical_offset", "along_beam"});
  if (node["size"]) magnet.size = vector3(node["size"], Dimension::Length, "source.magnet.size");
  if (node["remanence"]) {
    magnet.remanence =
        quantity(node["remanence"], Dimension::MagneticField, "source.magnet.remanence");
  }
  if (node["direction"]) {
    magnet.direction =
        vector3(node["direction"], Dimension::Dimensionless, "source.magnet.direction");
  }
  if (node["vertical_offset"]) {
    magnet.vertical_offset =
        quantity(node["vertical_offset"], Dimension::Length, "source.magnet.vertical_offset");
  }
  if (node["along_beam"]) {
    magnet.along_beam = quantity(node["along_beam"], Dimension::Length, "source.magnet.along_beam");
  }
  if (!(magnet.size.minCoeff() > 0.0)) fail(node, "'source.magnet.size' must be positive");
  if (!(magnet.direction.norm() > 0.0)) fail(node, "'source.magnet.direction' must be non-zero");
}

void parse_source(const YAML::Node& node, RunConfig& cfg) {
  check_keys(node, "source", {"coils", "magnet", "background_gradient"});
  if (node["coils"] && node["magnet"]) fail(node, "'source' takes either 'coils' or 'magnet'");
  if (node["coils"]) {
    cfg.source = SourceKind::Coils;
    parse_coils(node["coils"], cfg.coils);
  } else if (node["magnet"]) {
    cfg.source = SourceKind::Magnet;
    parse_magnet(node["magnet"], cfg.magnet);
  } else {
    cfg.source = SourceKind::Background;
  }
  if (node["background_gradient"]) {
    cfg.background_gradient = quantity(node["background_gradient"], Dimension::FieldGradient,
                                       "source.background_gradient");
  }
}

void parse_lengths(const YAML::Node& node, const std::string& field, BeamGeometry& g) {
  if (node["L1"]) g.L1 = quantity(node["L1"], Dimension::Length, field + ".L1");
  if (node["L2"]) g.L2 = quantity(node["L2"], Dimension::Length, field + ".L2");
}

void parse_geometry(const YAML::Node& node, RunConfig& cfg) {
  check_keys(node, "geometry", {"L", "d", "L1", "L2", "induced"});
  BeamGeometry& g = cfg.geometry;
  if (node["L"]) g.L = quantity(node["L"], Dimension::Length, "geometry.L");
  if (node["d"]) g.d = quantity(node["d"], Dimension::Length, "geometry.d");
  parse_lengths(node, "geometry", g);
  cfg.induced_geometry = g;
  if (const auto induced = node["induced"]) {
    check_keys(induced, "geometry.induced", {"L1", "L2"});
    parse_lengths(induced, "geometry.induced", cfg.induced_geometry);
  }
}

void parse_trajectory(const YAML::Node& node, RunConfig& cfg) {
  check_keys(node, "trajectory", {"midpoint", "tilt"});
  if (node["midpoint"]) {
    cfg.trajectory_midpoint = vector3(node["midpoint"], Dimension::Length, "trajectory.midpoint");
  }
  if (node["tilt"]) cfg.tilt = quantity(node["tilt"], Dimension::Angle, "trajectory.tilt");
}

VelocityDistribution::Variant velocity_variant(const YAML::Node& node, const std::string& field) {
  check_keys(node, field, {"skew_normal", "gaussian", "histogram", "discrete"});
  if (node.size() != 1) fail(node, "'" + field + "' takes exactly one distribution");
  const auto entry = *node.begin();
  const auto kind = entry.first.as<std::string>();
  const YAML::Node body = entry.second;
  const std::string sub = field + "." + kind;
  if (kind == "skew_normal") {
    check_keys(body, sub, {"location", "scale", "shape"});
    return SkewNormal{
        quantity(required(body, "location", sub), Dimension::Velocity, sub + ".location"),
        quantity(required(body, "scale", sub), Dimension::Velocity, sub + ".scale"),
        number(required(body, "shape", sub), sub + ".shape")};
  }
  if (kind == "gaussian") {
    check_keys(body, sub, {"mean", "sigma"});
    return Gaussian{quantity(required(body, "mean", sub), Dimension::Velocity, sub + ".mean"),
                    quantity(required(body, "sigma", sub), Dimension::Velocity, sub + ".sigma")};
  }
  if (kind == "histogram") {
    check_keys(body, sub, {"edges", "weights"});
    return Empirical{
        quantity_list(required(body, "edges", sub), Dimension::Velocity, sub + ".edges"),
        quantity_list(required(body, "weights", sub), Dimension::Dimensionless, sub + ".weights")};
  }
  check_keys(body, sub, {"velocities", "weights"});
  return Discrete{
      quantity_list(required(body, "velocities", sub), Dimension::Velocity, sub + ".velocities"),
      quantity_list(required(body, "weights", sub), Dimension::Dimensionless, sub + ".weights")};
}

VelocityDistribution parse_velocity(const YAML::Node& node, const std::string& field) {
  auto variant = velocity_variant(node, field);
  try {
    return VelocityDistribution(std::move(variant));
  } catch (const DomainError& e) {
    fail(node, "'" + field + "': " + e.what());
  }
}

RotorSpecies parse_rotor(const YAML::Node& node, const std::string& field) {
  if (node.IsScalar()) {
    try {
      return builtin_rotor(node.Scalar());
    } catch (const DomainError& e) {
      fail(node, e.what());
    }
  }
  check_keys(node, field, {"builtin", "kind", "g_xx", "g_yy", "g_zz", "A", "B", "temperature"});
  RotorSpecies rotor;
  if (node["builtin"]) {
    try {
      rotor = builtin_rotor(scalar(node["builtin"], field + ".builtin"));
    } catch (const DomainError& e) {
      fail(node["builtin"], e.what());
    }
  }
  if (node["kind"]) {
    rotor.kind = choice<RotorKind>(node["kind"], field + ".kind",
                                   {{"spherical", RotorKind::Spherical},
                                    {"symmetric_prolate", RotorKind::SymmetricProlate},
                                    {"asymmetric", RotorKind::Asymmetric}});
  }
  if (node["g_xx"]) rotor.g_xx = number(node["g_xx"], field + ".g_xx");
  if (node["g_yy"]) rotor.g_yy = number(node["g_yy"], field + ".g_yy");
  if (node["g_zz"]) rotor.g_zz = number(node["g_zz"], field + ".g_zz");
  if (node["A"])
    rotor.A_cm = quantity(node["A"], Dimension::Wavenumber, field + ".A") / constants::inverse_cm;
  if (node["B"])
    rotor.B_cm = quantity(node["B"], Dimension::Wavenumber, field + ".B") / constants::inverse_cm;
  if (node["temperature"]) {
    rotor.temperature =
        quantity(node["temperature"], Dimension::Temperature, field + ".temperature");
  }
  return rotor;
}

Response parse_response(const YAML::Node& node, const std::string& field, int depth) {
  check_keys(node, field,
             {"hyperfine", "rotor", "diamagnetic", "magnetized", "nuclear_spin", "composite"});
  if (node.size() != 1) fail(node, "'" + field + "' takes exactly one response");
  const auto entry = *node.begin();
  const auto kind = entry.first.as<std::string>();
  const YAML::Node body = entry.second;
  const std::string sub = field + "." + kind;
  if (kind == "hyperfine") {
    try {
      return Response{Hyperfine{builtin_manifold(scalar(body, sub))}};
    } catch (const DomainError& e) {
      fail(body, e.what());
    }
  }
  if (kind == "rotor") return Response{Rotor{parse_rotor(body, sub)}};
  if (kind == "diamagnetic") {
    check_keys(body, sub, {"chi_m"});
    Diamagnetic d;
    if (body["chi_m"])
      d.chi_m = quantity(body["chi_m"], Dimension::MassSusceptibility, sub + ".chi_m");
    return Response{d};
  }
  if (kind == "magnetized") {
    check_keys(body, sub, {"mu_eff"});
    const double mu =
        quantity(required(body, "mu_eff", sub), Dimension::MagneticMoment, sub + ".mu_eff");
    return Response{Magnetized{mu / constants::bohr_magneton}};
  }
  if (kind == "nuclear_spin") {
    check_keys(body, sub, {"moment", "multiplicity"});
    NuclearSpin spin;
    if (body["moment"]) {
      spin.mu_nuclear = quantity(body["moment"], Dimension::MagneticMoment, sub + ".moment") /
                        constants::nuclear_magneton;
    }
    if (body["multiplicity"])
      spin.multiplicity = integer(body["multiplicity"], sub + ".multiplicity");
    return Response{spin};
  }
  if (depth > 0) fail(body, "composite responses cannot be nested");
  if (!body.IsSequence() || body.size() == 0) fail(body, "'" + sub + "' must be a non-empty list");
  Composite composite;
  for (std::size_t i = 0; i < body.size(); ++i) {
    composite.parts.push_back(
        parse_response(body[i], sub + "[" + std::to_string(i) + "]", depth + 1));
  }
  return Response{composite};
}

void set_parameter(Response& response, const ModelOverrides& overrides) {
  if (auto* m = std::get_if<Magnetized>(&response.value); m && overrides.mu_eff) {
    m->mu_eff = *overrides.mu_eff;
  } else if (auto* d = std::get_if<Diamagnetic>(&response.value); d && overrides.chi_m) {
    d->chi_m = *overrides.chi_m;
  } else if (auto* c = std::get_if<Composite>(&response.value)) {
    for (auto& part : c->parts) set_parameter(part, overrides);
  }
}

bool contains(const Response& response, auto predicate) {
  if (predicate(response)) return true;
  if (const auto* c = std::get_if<Composite>(&response.value)) {
    return std::any_of(c->parts.begin(), c->parts.end(),
                       [&](const Response& part) { return contains(part, predicate); });
  }
  return false;
}

SpeciesModel parse_species(const YAML::Node& node) {
  check_keys(node, "species",
             {"builtin", "name", "mass", "response", "velocity", "mu_eff", "chi_m"});
  SpeciesModel s;
  if (node["builtin"]) {
    try {
      s = builtin_species(scalar(node["builtin"], "species.builtin"));
    } catch (const DomainError& e) {
      fail(node["builtin"], e.what());
    }
  } else {
    for (const char* key : {"name", "mass", "response", "velocity"}) {
      if (!node[key])
        fail(node, "inline 'species' needs '" + std::string(key) + "' (or use 'builtin')");
    }
  }
  if (node["name"]) s.name = scalar(node["name"], "species.name");
  if (node["mass"]) s.mass = quantity(node["mass"], Dimension::Mass, "species.mass");
  if (node["response"]) s.response = parse_response(node["response"], "species.response", 0);
  if (node["velocity"]) s.velocity = parse_velocity(node["velocity"], "species.velocity");

  ModelOverrides overrides;
  if (node["mu_eff"]) {
    if (!contains(s.response,
                  [](const Response& r) { return std::holds_alternative<Magnetized>(r.value); })) {
      fail(node["mu_eff"], "'species.mu_eff' given but the species has no effective moment");
    }
    overrides.mu_eff = quantity(node["mu_eff"], Dimension::MagneticMoment, "species.mu_eff") /
                       constants::bohr_magneton;
  }
  if (node["chi_m"]) {
    if (!contains(s.response,
                  [](const Response& r) { return std::holds_alternative<Diamagnetic>(r.value); })) {
      fail(node["chi_m"], "'species.chi_m' given but the species has no diamagnetic part");
    }
    overrides.chi_m = quantity(node["chi_m"], Dimension::MassSusceptibility, "species.chi_m");
  }
  set_parameter(s.response, overrides);
  try {
    s.validate();
  } catch (const DomainError& e) {
    fail(node, std::string("invalid species: ") + e.what());
  }
  return s;
}

void parse_model(const YAML::Node& node, RunConfig& cfg) {
  check_keys(node, "model", {"m_integration", "boltzmann_average"});
  if (node["m_integration"]) {
    cfg.rotational.m_integration =
        choice<MIntegration>(node["m_integration"], "model.m_integration",
                             {{"closed_form", MIntegration::ClosedForm},
                              {"numeric", MIntegration::Numeric},
                              {"discrete_sum", MIntegration::DiscreteSum}});
  }
  if (node["boltzmann_average"]) {
    cfg.rotational.boltzmann_average =
        boolean(node["boltzmann_average"], "model.boltzmann_average");
  }
}

Dimension sweep_dimension(SweepKind kind) {
  switch (kind) {
    case SweepKind::Current:
      return Dimension::Current;
    case SweepKind::Distance:
      return Dimension::Length;
    case SweepKind::Gradient:
      return Dimension::FieldGradient;
  }
  return Dimension::Dimensionless;
}

void parse_sweep(const YAML::Node& node, RunConfig& cfg) {
  check_keys(node, "sweep", {"current", "distance", "gradient"});
  if (node.size() != 1) fail(node, "'sweep' takes exactly one of current, distance, gradient");
  const auto entry = *node.begin();
  const auto kind = entry.first.as<std::string>();
  const YAML::Node body = entry.second;
  const std::string sub = "sweep." + kind;
  cfg.sweep.kind = kind == "current"    ? SweepKind::Current
                   : kind == "distance" ? SweepKind::Distance
                                        : SweepKind::Gradient;
  const Dimension dim = sweep_dimension(cfg.sweep.kind);
  if (body.IsSequence()) {
    cfg.sweep.values = quantity_list(body, dim, sub);
  } else {
    check_keys(body, sub, {"start", "stop", "step"});
    const double start = quantity(required(body, "start", sub), dim, sub + ".start");
    const double stop = quantity(required(body, "stop", sub), dim, sub + ".stop");
    const double step = quantity(required(body, "step", sub), dim, sub + ".step");
    if (!(step > 0.0) || stop < start) fail(body, "'" + sub + "' needs step > 0 and stop >= start");
    const double count = std::floor((stop - start) / step + 1e-9);
    if (count > 1e6) fail(body, "'" + sub + "' has too many points");
    for (int i = 0; i <= static_cast<int>(count); ++i) cfg.sweep.values.push_back(start + i * step);
  }
  if (cfg.sweep.values.empty()) fail(body, "'" + sub + "' is empty");
  if (cfg.sweep.kind == SweepKind::Distance &&
      std::any_of(cfg.sweep.values.begin(), cfg.sweep.values.end(),
                  [](double d) { return !(d > 0.0); })) {
    fail(body, "magnet distances must be positive");
  }
}

void parse_normalization(const YAML::Node& node, RunConfig& cfg) {
  check_keys(node, "normalization", {"asymptote_window"});
  if (const auto window = node["asymptote_window"]) {
    const auto values =
        quantity_list(window, sweep_dimension(cfg.sweep.kind), "normalization.asymptote_window");
    if (values.size() != 2) fail(window, "'normalization.asymptote_window' needs two bounds");
    cfg.asymptote_window = {std::min(values[0], values[1]), std::max(values[0], values[1])};
  }
}

void parse_fit(const YAML::Node& node, RunConfig& cfg) {
  check_keys(node, "fit", {"free", "optimizer", "max_evaluations"});
  if (const auto free = node["free"]) {
    if (!free.IsSequence()) fail(free, "'fit.free' must be a list");
    for (std::size_t i = 0; i < free.size(); ++i) {
      cfg.fit.free.push_back(
          choice<FitParam>(free[i], "fit.free",
                           {{"background_gradient", FitParam::BackgroundGradient},
                            {"mu_eff", FitParam::MuEff},
                            {"v0", FitParam::V0},
                            {"chi_m", FitParam::ChiM}}));
    }
  }
  if (node["optimizer"]) {
    cfg.fit.optimizer = choice<Optimizer>(
        node["optimizer"], "fit.optimizer",
        {{"nelder_mead", Optimizer::NelderMead}, {"gauss_newton", Optimizer::GaussNewton}});
  }
  if (node["max_evaluations"]) {
    cfg.fit.max_evaluations = integer(node["max_evaluations"], "fit.max_evaluations");
  }
}

void parse_output(const YAML::Node& node, RunConfig& cfg) {
  check_keys(node, "output", {"curve", "profile"});
  if (node["curve"]) cfg.output_curve = scalar(node["curve"], "output.curve");
  if (node["profile"]) cfg.output_profile = scalar(node["profile"], "output.profile");
}

}  // namespace

void RunConfig::validate() const {
  auto check_geometry = [](const BeamGeometry& g, const std::string& field) {
    try {
      g.validate();
    } catch (const DomainError& e) {
      throw ConfigError("'" + field + "': " + e.what());
    }
  };
  check_geometry(geometry, "geometry");
  check_geometry(induced_geometry, "geometry.induced");
  if (!std::isfinite(tilt) || std::abs(tilt) >= std::numbers::pi / 2) {
    throw ConfigError("'trajectory.tilt' must be below 90 degrees");
  }
  const SweepKind expected = source == SourceKind::Coils    ? SweepKind::Current
                             : source == SourceKind::Magnet ? SweepKind::Distance
                                                            : SweepKind::Gradient;
  if (sweep.kind != expected) {
    throw ConfigError("'sweep' for a " + std::string(to_string(source)) + " source must be a " +
                      std::string(to_string(expected)) + " sweep");
  }
  if (sweep.values.empty()) throw ConfigError("'sweep' has no values");
  try {
    species.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("'species': ") + e.what());
  }
  if (asymptote_window && !std::holds_alternative<Hyperfine>(species.response.value)) {
    throw ConfigError("'normalization.asymptote_window' needs a hyperfine species");
  }
  if (fit.max_evaluations < 1) throw ConfigError("'fit.max_evaluations' must be positive");
}

RunConfig parse_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.line + 1, e.mark.column + 1);
  }
  if (!root || root.IsNull()) throw ConfigError("config is empty");
  check_keys(root, "config",
             {"experiment", "source", "geometry", "trajectory", "species", "model", "sweep",
              "normalization", "fit", "output"});

  RunConfig cfg;
  if (root["experiment"]) cfg.experiment = scalar(root["experiment"], "experiment");
  parse_source(required(root, "source", "config"), cfg);
  if (root["geometry"]) {
    parse_geometry(root["geometry"], cfg);
  } else {
    cfg.induced_geometry = cfg.geometry;
  }
  if (root["trajectory"]) parse_trajectory(root["trajectory"], cfg);
  cfg.species = parse_species(required(root, "species", "config"));
  if (root["model"]) parse_model(root["model"], cfg);
  parse_sweep(required(root, "sweep", "config"), cfg);
  if (root["normalization"]) parse_normalization(root["normalization"], cfg);
  if (root["fit"]) parse_fit(root["fit"], cfg);
  if (root["output"]) parse_output(root["output"], cfg);
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(path, ec)) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
  }
  if (const auto bundled = bundled_config_text(path.filename().string())) {
    return parse_config(*bundled);
  }
  throw IoError("config '" + path.string() + "' not found (and no bundled config of that name)");
}

}  // namespace fringemag
