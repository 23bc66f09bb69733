#pragma once

// Run configuration: one YAML document describing the field source, the
// interferometer, the beam species and the abscissa sweep. Quantities are
// strings with units ("0.4 G/m", "3.6 deg"); bare numbers are SI.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fringemag/beamline.hpp"
#include "fringemag/fieldmodel.hpp"
#include "fringemag/fit.hpp"
#include "fringemag/species.hpp"
#include "fringemag/visibility.hpp"

namespace fringemag {

enum class SourceKind { Coils, Magnet, Background };

/// Cuboid permanent magnet beside the beam. Its face nearest the beam sits at
/// x = -distance, the distance being the sweep abscissa.
struct MagnetConfig {
  Vec3 size{0.01, 0.02, 0.02};  // m, full edge lengths
  double remanence = 1.3;       // T
  Vec3 direction = Vec3::UnitX();
  double vertical_offset = -0.006;  // m, y of the magnet centre
  double along_beam = 0.0;          // m, z of the magnet centre

  CuboidMagnet at_distance(double distance) const;
};

enum class SweepKind { Current, Distance, Gradient };

struct SweepConfig {
  SweepKind kind = SweepKind::Current;
  std::vector<double> values;  // SI

  /// CSV column name: current_A, distance_m or gradient_T_per_m.
  std::string label() const;
};

struct FitConfig {
  std::vector<FitParam> free;
  Optimizer optimizer = Optimizer::NelderMead;
  int max_evaluations = 2000;
};

struct RunConfig {
  std::string experiment;

  SourceKind source = SourceKind::Coils;
  CoilAssemblySpec coils;  // current is ignored; C-factors are per ampere
  MagnetConfig magnet;
  double background_gradient = 0.0;  // T/m, dB0/dx over the whole apparatus

  BeamGeometry geometry;          // permanent-moment force region
  BeamGeometry induced_geometry;  // induced-moment force region

  Vec3 trajectory_midpoint = Vec3::Zero();  // m
  double tilt = 0.0;                        // rad, towards +x

  SpeciesModel species;
  RotationalOptions rotational;

  SweepConfig sweep;
  std::optional<std::pair<double, double>> asymptote_window;
  FitConfig fit;

  std::string output_curve;
  std::string output_profile;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses and validates. Syntax errors and unknown keys are reported with the
/// 1-based line and column of the offending node.
RunConfig parse_config(std::string_view text);

/// Reads a file (or, when no such file exists, a bundled config of that name)
/// and parses it.
RunConfig load_config(const std::filesystem::path& path);

std::string_view to_string(SourceKind kind);
std::string_view to_string(SweepKind kind);

}  // namespace fringemag
