#pragma once

// Magnetostatic sources: circular current loops, coil assemblies built from
// them, uniformly magnetized cuboids and uniform backgrounds. All positions in
// metres, fields in tesla, currents in ampere.

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <vector>

namespace fringemag {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct CurrentLoop {
  Vec3 center = Vec3::Zero();
  Vec3 axis = Vec3::UnitZ();  // unit normal; positive current circulates right-handed about it
  double radius = 0.0;
  double current = 0.0;
};

enum class Polarity { AntiHelmholtz, Helmholtz };

/// Two multi-layer coils sharing one axis. Layers stack radially outward from
/// `nominal_radius`, turns stack axially and are centred on each coil plane.
struct CoilAssemblySpec {
  double nominal_radius = 0.04;
  double wire_diameter = 2e-3;
  int turns_per_layer = 13;
  int layers = 4;
  double center_separation = 0.07;
  Vec3 center = Vec3::Zero();
  Vec3 axis = Vec3::UnitX();
  double current = 1.0;
  Polarity polarity = Polarity::AntiHelmholtz;
};

/// Uniformly magnetized rectangular block. `magnetization` is the polarization
/// mu0*M in tesla (remanence times unit direction), expressed in the body frame;
/// `orientation` rotates body-frame vectors into the lab frame.
struct CuboidMagnet {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Constant(0.005);
  Vec3 magnetization = Vec3::Zero();
  Mat3 orientation = Mat3::Identity();
};

/// Composite source. Evaluated as the sum of all members plus a uniform
/// background and an optional constant background gradient,
/// B_bg(p) = background + background_gradient * p.
struct FieldSource {
  std::vector<CurrentLoop> loops;
  std::vector<CuboidMagnet> cuboids;
  Vec3 background = Vec3::Zero();
  Mat3 background_gradient = Mat3::Zero();

  FieldSource& operator+=(const FieldSource& other);
  friend FieldSource operator+(FieldSource a, const FieldSource& b) { return a += b; }

  /// Copy with every loop current multiplied by `factor`.
  FieldSource with_current_scale(double factor) const;

  /// Throws DomainError when a member violates its invariants (non-unit axis,
  /// non-positive radius or extents, background gradient that is not
  /// divergence- and curl-free).
  void validate() const;
};

enum class LoopMethod {
  Elliptic,    // closed form in complete elliptic integrals
  Quadrature,  // Biot-Savart line integral, trapezoidal rule in the azimuth
};

struct FieldOptions {
  LoopMethod loop_method = LoopMethod::Elliptic;
  int loop_segments = 256;
};

/// Field of a single filamentary loop. Throws SingularityError within 1e-9 m of
/// the wire.
Vec3 loop_field(const CurrentLoop& loop, const Vec3& p, const FieldOptions& options = {});

/// 2 * layers * turns_per_layer loops. The coil at +separation/2 along `axis`
/// carries +current; its partner carries -current (anti-Helmholtz) or +current.
FieldSource build_anti_helmholtz(const CoilAssemblySpec& spec);

/// Magnetic surface-charge solution for a uniformly magnetized cuboid. Points on
/// the surface are accepted; strictly interior points throw InsideBodyError.
Vec3 cuboid_field(const CuboidMagnet& magnet, const Vec3& p);

Vec3 field(const FieldSource& source, const Vec3& p, const FieldOptions& options = {});

inline constexpr double kDefaultJacobianStep = 1e-6;

/// Central-difference Jacobian J(i, j) = dB_i / dx_j in T/m.
Mat3 field_jacobian(const FieldSource& source, const Vec3& p, double h = kDefaultJacobianStep,
                    const FieldOptions& options = {});

/// Gradient of |B|, J^T * B/|B|. Throws FieldZeroError if |B| <= 1e-12 T.
Vec3 grad_bmag(const FieldSource& source, const Vec3& p, double h = kDefaultJacobianStep,
               const FieldOptions& options = {});

/// (B . grad) B_x in T^2/m; the x-force density on an induced moment.
double b_dot_grad_bx(const FieldSource& source, const Vec3& p, double h = kDefaultJacobianStep,
                     const FieldOptions& options = {});

/// B, J at one point from a single stencil pass.
struct FieldSample {
  Vec3 B;
  Mat3 J;
};
FieldSample sample_field(const FieldSource& source, const Vec3& p, double h = kDefaultJacobianStep,
                         const FieldOptions& options = {});

}  // namespace fringemag
