#pragma once

// Visibility as a function of an experimental abscissa (coil current or magnet
// distance), with the handful of parameters a fit may vary.

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "fringemag/visibility.hpp"

namespace fringemag {

/// C-factors at one abscissa value.
struct CPair {
  double permanent = 0.0;  // T m
  double induced = 0.0;    // T^2 m
};

using CFactorFn = std::function<CPair(double abscissa)>;

/// Loop sources scale with the current: |B| and hence C go as |I|, the
/// induced C_ind as I^2.
CFactorFn current_scaling(CPair per_amp);

/// Parameters that replace the configured values for one evaluation.
struct ModelOverrides {
  std::optional<double> background_gradient;  // T/m
  std::optional<double> mu_eff;               // Bohr magnetons
  std::optional<double> chi_m;                // m^3/kg
};

/// Copy of `species` with every Magnetized / Diamagnetic part updated.
SpeciesModel apply_overrides(SpeciesModel species, const ModelOverrides& overrides);

/// Calls body(i) for i in [0, n) on up to `threads` workers. Each index is
/// handled exactly once; the first exception is rethrown after all workers
/// finish.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

class CurveModel {
 public:
  CurveModel(SpeciesModel species, BeamGeometry geometry, CFactorFn c_of,
             double background_gradient = 0.0);

  /// Precomputes C-factors at the given abscissae (useful when each needs a
  /// field integration). Later predictions at these points reuse them.
  void tabulate(std::span<const double> abscissa, int threads = 1);

  CPair c_factors(double abscissa) const;

  /// V/V0 at one abscissa.
  double predict(double abscissa, const ModelOverrides& overrides = {}) const;
  /// V/V0 for already computed C-factors.
  double predict(const CPair& c, const ModelOverrides& overrides) const;

  VisibilityCurve sweep(std::span<const double> abscissa, const std::string& label, int threads = 1,
                        const ModelOverrides& overrides = {}) const;

  const SpeciesModel& species() const { return species_; }
  const BeamGeometry& geometry() const { return geometry_; }
  double background_gradient() const { return background_gradient_; }

  RotationalOptions rotational;
  AmplitudeFn amplitude;
  QuadratureOptions quadrature;

 private:
  SpeciesModel species_;
  BeamGeometry geometry_;
  CFactorFn c_of_;
  double background_gradient_;
  std::map<double, CPair> table_;
};

}  // namespace fringemag
