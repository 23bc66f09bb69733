#pragma once

// Path integrals of the transverse force along the beam: the C-factor that
// converts a magnetic moment (or susceptibility) into a fringe displacement.

#include <functional>
#include <vector>

#include "fringemag/fieldmodel.hpp"

namespace fringemag {

/// Interferometer lengths in metres. L is the grating separation, d the grating
/// period; the force region has length L1 and is followed by L2 up to the next
/// grating, leaving L - L1 - L2 of drift.
struct BeamGeometry {
  double L = 0.98;
  double d = 266e-9;
  double L1 = 0.30;
  double L2 = 0.24;

  double drift() const { return L - L1 - L2; }

  /// Throws DomainError unless d > 0, L1 > 0, L2 >= 0 and L1 + L2 <= L.
  void validate() const;
};

/// Straight line through the force region, parameterised by s in [0, length].
struct Trajectory {
  Vec3 entry = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();
  double length = 0.30;
  double tilt = 0.0;  // radians, reporting only

  Vec3 at(double s) const { return entry + s * direction; }

  /// Trajectory of the given length whose midpoint is `midpoint`. The nominal
  /// direction `beam_axis` is rotated by `tilt` towards `tilt_axis` (the coil
  /// axis for the coil experiments).
  static Trajectory centered(const Vec3& midpoint, double length, double tilt = 0.0,
                             const Vec3& beam_axis = Vec3::UnitZ(),
                             const Vec3& tilt_axis = Vec3::UnitX());
};

enum class ForceKind {
  Permanent,  // integrand d|B|/dx, C in T m
  Induced,    // integrand (B . grad) B_x, C in T^2 m
};

enum class CForm {
  Weighted,  // single integral of (L1 - s + L_drift) g(s)
  Nested,    // inner cumulative integral, then outer integral, on one grid
};

struct CFactorOptions {
  double rel_tol = 1e-6;
  int initial_panels = 64;
  int max_refinements = 14;
  CForm form = CForm::Weighted;
  double jacobian_step = kDefaultJacobianStep;
  FieldOptions field;
};

struct CFactor {
  ForceKind kind = ForceKind::Permanent;
  double value = 0.0;
  BeamGeometry geometry;
  int nodes = 0;
  double error_estimate = 0.0;
  bool converged = false;
};

struct ProfileSample {
  double s = 0.0;
  Vec3 B = Vec3::Zero();
  double dbdx = 0.0;       // (grad |B|)_x; zero where |B| vanishes
  double b_grad_bx = 0.0;  // (B . grad) B_x
};

/// n >= 2 equally spaced samples over [0, trajectory.length].
std::vector<ProfileSample> sample_profile(const FieldSource& source, const Trajectory& trajectory,
                                          int n, const FieldOptions& options = {});

/// Force integrand along the trajectory for the chosen kind. Inside a field
/// null the permanent-kind integrand is only accepted (as zero) if the local
/// Jacobian is negligible as well; otherwise FieldZeroError propagates.
double force_integrand(const FieldSource& source, const Trajectory& trajectory, ForceKind kind,
                       double s, const CFactorOptions& options = {});

/// Composite Simpson on [0, geometry.L1] with panel doubling until successive
/// estimates differ by less than rel_tol (relative). Throws ConvergenceError
/// after max_refinements.
CFactor integrate_c(const std::function<double(double)>& integrand, const BeamGeometry& geometry,
                    ForceKind kind, const CFactorOptions& options = {});

CFactor c_factor(const FieldSource& source, const Trajectory& trajectory,
                 const BeamGeometry& geometry, ForceKind kind, const CFactorOptions& options = {});

/// C0 = L^2 dB0/dx for a constant background gradient over the whole
/// interferometer.
double background_c(const BeamGeometry& geometry, double dB0dx);

}  // namespace fringemag
