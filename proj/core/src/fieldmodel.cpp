#include "fringemag/fieldmodel.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fringemag/constants.hpp"
#include "fringemag/errors.hpp"

namespace fringemag {

namespace {

using constants::mu0;
using constants::pi;

constexpr double kWireTolerance = 1e-9;
constexpr double kAxisTolerance = 1e-12;

// Any unit vector orthogonal to n (n must be unit length).
Vec3 orthogonal_unit(const Vec3& n) {
  const Vec3 trial = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return (trial - trial.dot(n) * n).normalized();
}

struct LoopFrame {
  double axial;  // coordinate along the loop axis
  double rho;    // distance from the axis
  Vec3 radial;   // unit radial direction (arbitrary on the axis)
};

LoopFrame loop_frame(const CurrentLoop& loop, const Vec3& p) {
  const Vec3 d = p - loop.center;
  const double z = d.dot(loop.axis);
  const Vec3 r = d - z * loop.axis;
  const double rho = r.norm();
  return {z, rho, rho > 0.0 ? Vec3(r / rho) : orthogonal_unit(loop.axis)};
}

double wire_distance(const CurrentLoop& loop, const Vec3& p) {
  const LoopFrame f = loop_frame(loop, p);
  return std::hypot(f.rho - loop.radius, f.axial);
}

void check_off_wire(const CurrentLoop& loop, const Vec3& p) {
  if (wire_distance(loop, p) <= kWireTolerance) {
    throw SingularityError("field evaluation point lies on a current filament");
  }
}

Vec3 loop_field_elliptic(const CurrentLoop& loop, const Vec3& p) {
  const LoopFrame f = loop_frame(loop, p);
  const double a = loop.radius;
  const double z = f.axial;
  const double rho = f.rho;
  const double r2 = rho * rho + z * z;
  const double alpha2 = a * a + r2 - 2.0 * a * rho;
  const double beta2 = a * a + r2 + 2.0 * a * rho;
  const double beta = std::sqrt(beta2);
  const double k = std::sqrt(std::max(0.0, 1.0 - alpha2 / beta2));
  const double K = std::comp_ellint_1(k);
  const double E = std::comp_ellint_2(k);
  const double c = mu0 * loop.current / pi;

  const double b_axial = c / (2.0 * alpha2 * beta) * ((a * a - r2) * E + alpha2 * K);
  double b_rho = 0.0;
  if (rho < 1e-6 * a) {
    // Leading term of the near-axis expansion; the closed form is 0/0 here.
    b_rho = 3.0 * mu0 * loop.current * a * a * z * rho / (4.0 * std::pow(a * a + z * z, 2.5));
  } else {
    b_rho = c * z / (2.0 * alpha2 * beta * rho) * ((a * a + r2) * E - alpha2 * K);
  }
  return b_axial * loop.axis + b_rho * f.radial;
}

Vec3 loop_field_quadrature(const CurrentLoop& loop, const Vec3& p, int segments) {
  const Vec3 e1 = orthogonal_unit(loop.axis);
  const Vec3 e2 = loop.axis.cross(e1);
  const double dphi = 2.0 * pi / segments;
  Vec3 sum = Vec3::Zero();
  for (int i = 0; i < segments; ++i) {
    const double phi = i * dphi;
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    const Vec3 rim = loop.center + loop.radius * (c * e1 + s * e2);
    const Vec3 tangent = loop.radius * (-s * e1 + c * e2);
    const Vec3 sep = p - rim;
    const double dist = sep.norm();
    sum += tangent.cross(sep) / (dist * dist * dist);
  }
  return mu0 * loop.current / (4.0 * pi) * dphi * sum;
}

// Field of a uniformly charged rectangle (unit surface density) lying in the
// plane x[w] = offset, spanning [-h[u], h[u]] x [-h[v], h[v]], evaluated at the
// body-frame point q. `outward` is the side treated as exterior when q lies in
// the sheet plane.
Vec3 charged_sheet(const Vec3& q, const Vec3& h, int w, double offset, double outward) {
  const int u_axis = (w + 1) % 3;
  const int v_axis = (w + 2) % 3;
  double wz = q[w] - offset;
  if (wz == 0.0) wz = std::copysign(1e-300, outward);
  const double us[2] = {q[u_axis] - h[u_axis], q[u_axis] + h[u_axis]};
  const double vs[2] = {q[v_axis] - h[v_axis], q[v_axis] + h[v_axis]};

  // log(t + sqrt(t^2 + s2)) without cancellation for negative t.
  auto log_plus_r = [](double t, double s2) {
    const double r = std::sqrt(t * t + s2);
    if (t >= 0.0) return std::log(t + r);
    return std::log(std::max(s2, 1e-200) / (r - t));
  };

  double fw = 0.0;
  double fu = 0.0;
  double fv = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double sign = (i == j) ? 1.0 : -1.0;
      const double u = us[i];
      const double v = vs[j];
      const double R = std::sqrt(u * u + v * v + wz * wz);
      if (R == 0.0) throw SingularityError("field evaluation point lies on a magnet corner");
      fw += sign * std::atan(u * v / (wz * R));
      fu -= sign * log_plus_r(v, u * u + wz * wz);
      fv -= sign * log_plus_r(u, v * v + wz * wz);
    }
  }
  Vec3 out = Vec3::Zero();
  out[w] = fw;
  out[u_axis] = fu;
  out[v_axis] = fv;
  return out;
}

}  // namespace

FieldSource& FieldSource::operator+=(const FieldSource& other) {
  loops.insert(loops.end(), other.loops.begin(), other.loops.end());
  cuboids.insert(cuboids.end(), other.cuboids.begin(), other.cuboids.end());
  background += other.background;
  background_gradient += other.background_gradient;
  return *this;
}

FieldSource FieldSource::with_current_scale(double factor) const {
  FieldSource out = *this;
  for (auto& loop : out.loops) loop.current *= factor;
  return out;
}

void FieldSource::validate() const {
  for (const auto& loop : loops) {
    if (std::abs(loop.axis.norm() - 1.0) > kAxisTolerance) {
      throw DomainError("current loop axis must be a unit vector");
    }
    if (!(loop.radius > 0.0)) throw DomainError("current loop radius must be positive");
    if (!loop.center.allFinite() || !std::isfinite(loop.current)) {
      throw DomainError("current loop has non-finite parameters");
    }
  }
  for (const auto& magnet : cuboids) {
    if (!(magnet.half_extents.array() > 0.0).all()) {
      throw DomainError("cuboid half extents must be positive");
    }
    const double orth =
        (magnet.orientation.transpose() * magnet.orientation - Mat3::Identity()).norm();
    if (orth > 1e-9) throw DomainError("cuboid orientation must be a rotation matrix");
  }
  const double scale = background_gradient.norm();
  if (scale > 0.0) {
    if (std::abs(background_gradient.trace()) > 1e-9 * scale) {
      throw DomainError("background gradient must be divergence-free (traceless)");
    }
    if ((background_gradient - background_gradient.transpose()).norm() > 1e-9 * scale) {
      throw DomainError("background gradient must be curl-free (symmetric)");
    }
  }
}

Vec3 loop_field(const CurrentLoop& loop, const Vec3& p, const FieldOptions& options) {
  check_off_wire(loop, p);
  if (loop.current == 0.0) return Vec3::Zero();
  if (options.loop_method == LoopMethod::Quadrature) {
    if (options.loop_segments < 3) throw DomainError("loop quadrature needs at least 3 segments");
    return loop_field_quadrature(loop, p, options.loop_segments);
  }
  return loop_field_elliptic(loop, p);
}

FieldSource build_anti_helmholtz(const CoilAssemblySpec& spec) {
  if (spec.turns_per_layer <= 0 || spec.layers <= 0) {
    throw DomainError("coil assembly needs at least one turn and one layer");
  }
  if (!(spec.nominal_radius > 0.0) || !(spec.wire_diameter >= 0.0)) {
    throw DomainError("coil radius must be positive and wire diameter non-negative");
  }
  if (std::abs(spec.axis.norm() - 1.0) > kAxisTolerance) {
    throw DomainError("coil axis must be a unit vector");
  }

  FieldSource source;
  source.loops.reserve(2 * spec.layers * spec.turns_per_layer);
  const double turn_mid = 0.5 * (spec.turns_per_layer - 1);
  for (int coil = 0; coil < 2; ++coil) {
    const double side = coil == 0 ? 1.0 : -1.0;
    const double current =
        spec.polarity == Polarity::AntiHelmholtz ? side * spec.current : spec.current;
    const Vec3 plane = spec.center + side * 0.5 * spec.center_separation * spec.axis;
    for (int layer = 0; layer < spec.layers; ++layer) {
      const double radius = spec.nominal_radius + (layer + 0.5) * spec.wire_diameter;
      for (int turn = 0; turn < spec.turns_per_layer; ++turn) {
        const double shift = (turn - turn_mid) * spec.wire_diameter;
        source.loops.push_back({plane + shift * spec.axis, spec.axis, radius, current});
      }
    }
  }
  return source;
}

Vec3 cuboid_field(const CuboidMagnet& magnet, const Vec3& p) {
  const Vec3& h = magnet.half_extents;
  const Vec3 q = magnet.orientation.transpose() * (p - magnet.center);

  const double tol = 1e-12 * h.maxCoeff();
  if ((q.array().abs() < (h.array() - tol)).all()) {
    throw InsideBodyError("field evaluation point lies inside the magnet body");
  }

  Vec3 body = Vec3::Zero();
  for (int axis = 0; axis < 3; ++axis) {
    const double polarization = magnet.magnetization[axis];
    if (polarization == 0.0) continue;
    const Vec3 top = charged_sheet(q, h, axis, h[axis], 1.0);
    const Vec3 bottom = charged_sheet(q, h, axis, -h[axis], -1.0);
    body += polarization / (4.0 * pi) * (top - bottom);
  }
  if (!body.allFinite()) {
    throw SingularityError("field evaluation point lies on a magnet edge");
  }
  return magnet.orientation * body;
}

Vec3 field(const FieldSource& source, const Vec3& p, const FieldOptions& options) {
  Vec3 total = source.background + source.background_gradient * p;
  for (const auto& loop : source.loops) total += loop_field(loop, p, options);
  for (const auto& magnet : source.cuboids) total += cuboid_field(magnet, p);
  return total;
}

FieldSample sample_field(const FieldSource& source, const Vec3& p, double h,
                         const FieldOptions& options) {
  if (!(h > 0.0)) throw DomainError("Jacobian step must be positive");
  for (const auto& loop : source.loops) {
    if (wire_distance(loop, p) <= 10.0 * h) {
      throw SingularityError("Jacobian stencil crosses a current filament");
    }
  }
  FieldSample out{field(source, p, options), Mat3::Zero()};
  for (int j = 0; j < 3; ++j) {
    Vec3 step = Vec3::Zero();
    step[j] = h;
    out.J.col(j) =
        (field(source, p + step, options) - field(source, p - step, options)) / (2.0 * h);
  }
  return out;
}

Mat3 field_jacobian(const FieldSource& source, const Vec3& p, double h,
                    const FieldOptions& options) {
  return sample_field(source, p, h, options).J;
}

Vec3 grad_bmag(const FieldSource& source, const Vec3& p, double h, const FieldOptions& options) {
  const FieldSample s = sample_field(source, p, h, options);
  const double magnitude = s.B.norm();
  if (magnitude <= 1e-12) {
    throw FieldZeroError("gradient of |B| is undefined where the field vanishes");
  }
  return s.J.transpose() * (s.B / magnitude);
}

double b_dot_grad_bx(const FieldSource& source, const Vec3& p, double h,
                     const FieldOptions& options) {
  const FieldSample s = sample_field(source, p, h, options);
  return s.J.row(0).dot(s.B);
}

}  // namespace fringemag
