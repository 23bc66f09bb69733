#pragma once

// Normalized fringe visibility V/V0 of a magnetically dephased beam. Every
// model averages over the velocity distribution; symmetric responses
// (hyperfine pairs, nuclear spins, rotational moments) enter as real cosine
// factors, one-sided responses as a complex phase.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fringemag/beamline.hpp"
#include "fringemag/quadrature.hpp"
#include "fringemag/species.hpp"

namespace fringemag {

/// Velocity dependence of the bare fringe amplitude; must stay within [0, 1].
using AmplitudeFn = std::function<double(double)>;

struct PhaseContext {
  BeamGeometry geometry;
  double c_permanent = 0.0;  // T m
  double c_induced = 0.0;    // T^2 m
  double c0 = 0.0;           // T m, background term; permanent moments only
  SpeciesModel species;
  AmplitudeFn amplitude;  // empty means A(v) = 1
  QuadratureOptions quadrature;

  double c_total() const { return c_permanent + c0; }
};

/// Fringe phase (2 pi / d) mu C / (m v^2) for a moment mu in J/T.
double phase_shift(double mu, double c_total, double v, double mass, double d);

/// Fringe phase of an induced moment m chi_m B / mu0; the mass cancels.
double induced_phase_shift(double chi_m, double c_induced, double v, double d);

double visibility_hyperfine(const PhaseContext& ctx);

enum class MIntegration {
  ClosedForm,   // sin(a R) / (a R)
  Numeric,      // Gauss-Legendre over M in [-R, R]
  DiscreteSum,  // (2R+1)-term sum over integer M
};

struct RotationalOptions {
  MIntegration m_integration = MIntegration::ClosedForm;
  bool boltzmann_average = false;  // average over the thermal R distribution
};

/// Mean of cos(a M) over M uniform in [-R, R].
double m_average_closed(double a, double R);
double m_average_numeric(double a, double R);
/// Mean of cos(a M) over the integers M = -R..R.
double m_average_discrete(double a, int R);

/// Spherical-top rotational moments, M treated as continuous on
/// [-r_max, r_max].
double visibility_rotational(const PhaseContext& ctx, int r_max,
                             const RotationalOptions& options = {});

/// Magnetized (constant mu_eff) or diamagnetic species.
double visibility_one_sided(const PhaseContext& ctx);

/// One-sided parts add their phases inside exp(i phi); symmetric parts
/// multiply the integrand by their mean cosine. Nested composites are rejected.
double visibility_composite(const PhaseContext& ctx, std::span<const Response> parts,
                            const RotationalOptions& options = {});

/// Dispatches on ctx.species.response.
double visibility(const PhaseContext& ctx, const RotationalOptions& options = {});

std::string describe(const Response& response);

struct VisibilityCurve {
  std::string abscissa_label;  // e.g. "current_A", "distance_m"
  std::vector<double> abscissa;
  std::vector<double> v_over_v0;
  std::vector<double> c_permanent;  // T m, per point
  std::vector<double> c_induced;    // T^2 m, per point
  std::string model;
};

}  // namespace fringemag
