#pragma once

// Magnetic and kinematic description of a beam species.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace fringemag {

// ---------------------------------------------------------------------------
// Hyperfine manifolds

struct HyperfineState {
  int F = 0;
  int m_F = 0;
  double mu_z = 0.0;  // Bohr magnetons, projection on the quantization axis
};

struct HyperfineManifold {
  std::string isotope;
  std::vector<HyperfineState> states;

  int size() const { return static_cast<int>(states.size()); }
};

enum class Isotope { Cs133, Rb85, Rb87 };

/// Weak-field hyperfine substates with their moment projections.
HyperfineManifold builtin_manifold(Isotope isotope);
/// Accepts "cs133", "rb85", "rb87" (case-insensitive). Throws DomainError
/// otherwise.
HyperfineManifold builtin_manifold(std::string_view isotope);

/// Fraction of substates with zero moment; the large-gradient visibility limit.
double asymptote_fraction(const HyperfineManifold& manifold);

// ---------------------------------------------------------------------------
// Rotors

enum class RotorKind { Spherical, SymmetricProlate, Asymmetric };

/// Rotational g-tensor (principal values, nuclear magnetons per unit angular
/// momentum) and rotational constants in cm^-1.
struct RotorSpecies {
  RotorKind kind = RotorKind::Spherical;
  double g_xx = 0.0;
  double g_yy = 0.0;
  double g_zz = 0.0;
  std::optional<double> A_cm;  // rotational constants, when known
  std::optional<double> B_cm;
  double temperature = 0.0;  // rotational temperature, K

  void validate() const;
};

/// "c60", "c70" or "tempo".
RotorSpecies builtin_rotor(std::string_view name);

/// Most populated rotational level of a (2R+1)-degenerate Boltzmann
/// distribution with rotational constant B (cm^-1) at temperature T (K).
int r_max(double B_cm, double temperature);

/// Population weights of levels 0..R_cut (normalized), R_cut chosen so that the
/// neglected tail is below 1e-12.
std::vector<double> rotational_populations(double B_cm, double temperature);

/// Projection of a symmetric-top rotational moment onto a space-fixed axis in
/// nuclear magnetons: M [g_xx + (g_zz - g_xx) K^2 / (R(R+1))].
double mu_rot_projection(double M, double K, double R, const RotorSpecies& rotor);

// ---------------------------------------------------------------------------
// Velocity distributions

struct SkewNormal {
  double location = 0.0;  // m/s
  double scale = 1.0;     // m/s
  double shape = 0.0;
};

struct Gaussian {
  double mean = 0.0;
  double sigma = 1.0;
};

/// Piecewise-constant density over contiguous bins.
struct Empirical {
  std::vector<double> edges;    // n + 1 increasing velocities
  std::vector<double> weights;  // n non-negative bin weights
};

/// Finite set of velocities with non-negative weights (delta beams, brute-force
/// checks). Has no density; averages become weighted sums.
struct Discrete {
  std::vector<double> velocities;  // > 0
  std::vector<double> weights;
};

/// Density truncated to v > 0 and renormalized there.
class VelocityDistribution {
 public:
  using Variant = std::variant<SkewNormal, Gaussian, Empirical, Discrete>;

  VelocityDistribution() : VelocityDistribution(Gaussian{}) {}
  VelocityDistribution(Variant v);  // NOLINT(google-explicit-constructor)

  const Variant& variant() const { return dist_; }

  double pdf(double v) const;

  /// Interval outside of which the density is negligible (< 1e-9 of the mass).
  std::pair<double, double> support() const;

  /// Interior points where the density is not smooth (bin edges).
  std::vector<double> breakpoints() const;

  /// Single-valued location used for reporting and seeding.
  double typical_velocity() const;

  bool is_discrete() const { return std::holds_alternative<Discrete>(dist_); }
  /// (velocity, normalized weight) pairs of a Discrete distribution; empty
  /// otherwise.
  std::vector<std::pair<double, double>> atoms() const;

 private:
  double raw_pdf(double v) const;

  Variant dist_;
  double norm_ = 1.0;  // probability mass of the untruncated density on v > 0
  std::pair<double, double> support_{0.0, 0.0};
};

// ---------------------------------------------------------------------------
// Magnetic response

struct Hyperfine {
  HyperfineManifold manifold;
};

struct Rotor {
  RotorSpecies rotor;
};

/// Induced moment m chi_m B / mu0; chi_m in m^3/kg. Unset until configured.
struct Diamagnetic {
  std::optional<double> chi_m;
};

/// Constant effective moment along B, in Bohr magnetons.
struct Magnetized {
  double mu_eff = 0.0;
};

/// Strong-field nuclear spin: `multiplicity` states with moments evenly spaced
/// from +mu to -mu (nuclear magnetons); a spin-1/2 nucleus gives +-mu.
struct NuclearSpin {
  double mu_nuclear = 0.702;
  int multiplicity = 2;
};

struct Response;

struct Composite {
  std::vector<Response> parts;
};

struct Response {
  std::variant<Hyperfine, Rotor, Diamagnetic, Magnetized, NuclearSpin, Composite> value;
};

struct SpeciesModel {
  std::string name;
  double mass = 0.0;  // kg
  Response response;
  VelocityDistribution velocity;

  void validate() const;
};

/// cs133, rb85, rb87, tempo, c60, c70, c69c13. Susceptibilities of the
/// fullerenes are left unset.
SpeciesModel builtin_species(std::string_view name);

/// Langevin-like effective moment kappa * mu^2 B / (k_B T) in J/T.
double langevin_mu_eff(double mu, double B, double temperature, double kappa = 1.0 / 3.0);

}  // namespace fringemag
