#include "fringemag/beamline.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <string>

#include "fringemag/errors.hpp"

namespace fringemag {

void BeamGeometry::validate() const {
  if (!(d > 0.0)) throw DomainError("grating period d must be positive");
  if (!(L1 > 0.0)) throw DomainError("force-region length L1 must be positive");
  if (!(L2 >= 0.0)) throw DomainError("L2 must be non-negative");
  if (L1 + L2 > L * (1.0 + 1e-12)) throw DomainError("L1 + L2 must not exceed L");
}

Trajectory Trajectory::centered(const Vec3& midpoint, double length, double tilt,
                                const Vec3& beam_axis, const Vec3& tilt_axis) {
  const Vec3 forward = beam_axis.normalized();
  const Vec3 sideways = (tilt_axis - tilt_axis.dot(forward) * forward).normalized();
  const Vec3 direction = std::cos(tilt) * forward + std::sin(tilt) * sideways;
  return {midpoint - 0.5 * length * direction, direction, length, tilt};
}

std::vector<ProfileSample> sample_profile(const FieldSource& source, const Trajectory& trajectory,
                                          int n, const FieldOptions& options) {
  if (n < 2) throw DomainError("profile needs at least two samples");
  std::vector<ProfileSample> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double s = trajectory.length * i / (n - 1);
    const FieldSample f = sample_field(source, trajectory.at(s), kDefaultJacobianStep, options);
    ProfileSample row;
    row.s = s;
    row.B = f.B;
    const double magnitude = f.B.norm();
    row.dbdx = magnitude > 1e-12 ? f.J.col(0).dot(f.B) / magnitude : 0.0;
    row.b_grad_bx = f.J.row(0).dot(f.B);
    out.push_back(row);
  }
  return out;
}

double force_integrand(const FieldSource& source, const Trajectory& trajectory, ForceKind kind,
                       double s, const CFactorOptions& options) {
  const FieldSample f =
      sample_field(source, trajectory.at(s), options.jacobian_step, options.field);
  if (kind == ForceKind::Induced) return f.J.row(0).dot(f.B);
  const double magnitude = f.B.norm();
  if (magnitude <= 1e-12) {
    // A vanishing source (zero current, magnet at infinity) has no force.
    if (f.J.norm() <= 1e-9) return 0.0;
    throw FieldZeroError("trajectory passes through a field null");
  }
  return f.J.col(0).dot(f.B) / magnitude;
}

namespace {

// Simpson estimate of the C integral from equally spaced samples g[0..n].
double weighted_simpson(const std::vector<double>& g, double L1, double drift) {
  const int n = static_cast<int>(g.size()) - 1;
  const double h = L1 / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * (L1 - s + drift) * g[i];
  }
  return sum * h / 3.0;
}

double nested_simpson(const std::vector<double>& g, double L1, double drift) {
  const int n = static_cast<int>(g.size()) - 1;
  const double h = L1 / n;
  // Cumulative integral G(s_i) = int_0^{s_i} g. Even nodes by Simpson pairs,
  // odd nodes via the quadratic through the enclosing pair.
  std::vector<double> G(n + 1, 0.0);
  for (int i = 0; i + 2 <= n; i += 2) {
    G[i + 1] = G[i] + h / 12.0 * (5.0 * g[i] + 8.0 * g[i + 1] - g[i + 2]);
    G[i + 2] = G[i] + h / 3.0 * (g[i] + 4.0 * g[i + 1] + g[i + 2]);
  }
  double outer = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    outer += w * G[i];
  }
  outer *= h / 3.0;
  return outer + drift * G[n];
}

}  // namespace

CFactor integrate_c(const std::function<double(double)>& integrand, const BeamGeometry& geometry,
                    ForceKind kind, const CFactorOptions& options) {
  geometry.validate();
  if (!(options.rel_tol > 0.0 && options.rel_tol <= 1e-2)) {
    throw DomainError("rel_tol must lie in (0, 1e-2]");
  }
  int panels = options.initial_panels;
  if (panels < 2 || panels % 2) throw DomainError("initial panel count must be even and >= 2");

  const double L1 = geometry.L1;
  const double drift = geometry.drift();
  auto estimate = [&](const std::vector<double>& g) {
    return options.form == CForm::Nested ? nested_simpson(g, L1, drift)
                                         : weighted_simpson(g, L1, drift);
  };

  std::vector<double> g(panels + 1);
  for (int i = 0; i <= panels; ++i) g[i] = integrand(L1 * i / panels);
  double previous = estimate(g);

  CFactor result;
  result.kind = kind;
  result.geometry = geometry;
  for (int refinement = 0; refinement < options.max_refinements; ++refinement) {
    const int finer = 2 * panels;
    std::vector<double> next(finer + 1);
    for (int i = 0; i <= panels; ++i) next[2 * i] = g[i];
    for (int i = 0; i < panels; ++i) next[2 * i + 1] = integrand(L1 * (2 * i + 1) / finer);
    g = std::move(next);
    panels = finer;
    const double current = estimate(g);
    const double change = std::abs(current - previous);
    previous = current;
    if (!std::isfinite(current)) throw ConvergenceError("C-factor integrand is not finite");
    if (change <= options.rel_tol * std::abs(current)) {
      result.value = current;
      result.nodes = panels + 1;
      result.error_estimate = change;
      result.converged = true;
      return result;
    }
  }
  throw ConvergenceError("C-factor quadrature did not converge after " +
                         std::to_string(options.max_refinements) + " refinements");
}

CFactor c_factor(const FieldSource& source, const Trajectory& trajectory,
                 const BeamGeometry& geometry, ForceKind kind, const CFactorOptions& options) {
  return integrate_c(
      [&](double s) { return force_integrand(source, trajectory, kind, s, options); }, geometry,
      kind, options);
}

double background_c(const BeamGeometry& geometry, double dB0dx) {
  return geometry.L * geometry.L * dB0dx;
}

}  // namespace fringemag
