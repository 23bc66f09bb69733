#pragma once

// Turns a RunConfig into field sources, C-factors and visibility curves, and
// runs the bundled figure reproductions.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fringemag/config.hpp"
#include "fringemag/curve_model.hpp"

namespace fringemag {

/// Config files compiled into the library, keyed by file name.
const std::map<std::string, std::string>& bundled_configs();

/// Text of a bundled config; `name` may omit the .cfg extension.
std::optional<std::string> bundled_config_text(std::string_view name);

class Experiment {
 public:
  explicit Experiment(RunConfig config, CFactorOptions c_options = {});

  const RunConfig& config() const { return config_; }

  /// Field source at one sweep abscissa (current, magnet distance or
  /// background gradient).
  FieldSource source_at(double abscissa) const;

  /// Straight path through the force region of the given kind.
  Trajectory trajectory(ForceKind kind) const;

  /// Both C-factors at one abscissa. A kind the species does not respond to is
  /// reported as zero without being integrated.
  CPair c_factors(double abscissa) const;

  CurveModel curve_model() const;

  /// V/V0 over the configured sweep.
  VisibilityCurve sweep(int threads = 1) const;

  std::vector<ProfileSample> profile(double abscissa, int samples) const;

  bool needs_permanent() const { return needs_permanent_; }
  bool needs_induced() const { return needs_induced_; }

 private:
  CPair integrate_c(const FieldSource& source) const;

  RunConfig config_;
  CFactorOptions c_options_;
  bool needs_permanent_ = false;
  bool needs_induced_ = false;
  CPair per_amp_;  // coil sources only
};

struct FigureCurve {
  std::string name;  // file stem, e.g. "fig2_cs_380"
  VisibilityCurve curve;
};

struct Reproduction {
  std::string figure;
  std::vector<FigureCurve> curves;
};

/// fig2-cs, fig3-tempo, fig4-fullerenes, figS4-rb.
const std::vector<std::string>& figure_ids();

/// Runs the bundled configs behind a figure. Throws DomainError for an
/// unknown id.
Reproduction reproduce(std::string_view figure_id, int threads = 1);

}  // namespace fringemag
