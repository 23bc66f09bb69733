#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's numerics: closed forms, brute-force quadrature and enumeration.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include <Eigen/Core>

namespace oracle {

inline constexpr double kMu0 = 1.25663706212e-6;
inline constexpr double kBohrMagneton = 9.2740100783e-24;
inline constexpr double kNuclearMagneton = 5.0507837461e-27;
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;
inline constexpr double kPlanck = 6.62607015e-34;
inline constexpr double kLightSpeed = 299792458.0;
inline constexpr double kBoltzmann = 1.380649e-23;
inline constexpr double kPi = std::numbers::pi;

/// B_z on the axis of a circular loop in the z = 0 plane.
inline double loop_axis_field(double radius, double current, double z) {
  const double r2 = radius * radius;
  return kMu0 * current * r2 / (2.0 * std::pow(r2 + z * z, 1.5));
}

/// Composite 16-point Gauss-Legendre nodes and weights on [lo, hi].
inline std::vector<std::pair<double, double>> composite_gauss(double lo, double hi, int panels) {
  using Rule = boost::math::quadrature::gauss<double, 16>;
  std::vector<std::pair<double, double>> nodes;
  const double h = (hi - lo) / panels;
  for (int k = 0; k < panels; ++k) {
    const double mid = lo + (k + 0.5) * h;
    for (std::size_t i = 0; i < Rule::abscissa().size(); ++i) {
      const double x = 0.5 * h * Rule::abscissa()[i];
      const double w = 0.5 * h * Rule::weights()[i];
      nodes.emplace_back(mid + x, w);
      nodes.emplace_back(mid - x, w);
    }
  }
  return nodes;
}

/// Field of a uniformly magnetized, axis-aligned cuboid (magnetization in
/// tesla) from its magnetic surface charge, sigma = M . n, integrated face by
/// face with a dense tensor Gauss-Legendre rule. Points must lie a few
/// millimetres or more from the surface.
inline Eigen::Vector3d cuboid_surface_charge(const Eigen::Vector3d& center,
                                             const Eigen::Vector3d& half,
                                             const Eigen::Vector3d& magnetization,
                                             const Eigen::Vector3d& p) {
  constexpr int kPanels = 32;
  Eigen::Vector3d B = Eigen::Vector3d::Zero();
  for (int axis = 0; axis < 3; ++axis) {
    const int u = (axis + 1) % 3;
    const int w = (axis + 2) % 3;
    const auto nodes_u = composite_gauss(-half[u], half[u], kPanels);
    const auto nodes_w = composite_gauss(-half[w], half[w], kPanels);
    for (const double side : {-1.0, 1.0}) {
      const double sigma = side * magnetization[axis];
      if (sigma == 0.0) continue;
      Eigen::Vector3d face = Eigen::Vector3d::Zero();
      for (const auto& [a, wa] : nodes_u) {
        for (const auto& [b, wb] : nodes_w) {
          Eigen::Vector3d q = center;
          q[axis] += side * half[axis];
          q[u] += a;
          q[w] += b;
          const Eigen::Vector3d r = p - q;
          face += wa * wb * r / std::pow(r.norm(), 3);
        }
      }
      B += sigma / (4.0 * kPi) * face;
    }
  }
  return B;
}

/// Point-dipole field of moment m (A m^2) at displacement r.
inline Eigen::Vector3d dipole_field(const Eigen::Vector3d& m, const Eigen::Vector3d& r) {
  const double d = r.norm();
  const Eigen::Vector3d n = r / d;
  return kMu0 / (4.0 * kPi) * (3.0 * n * n.dot(m) - m) / (d * d * d);
}

/// Composite Simpson with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return sum * h / 3.0;
}

inline double gaussian_pdf(double v, double mean, double sigma) {
  const double z = (v - mean) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * kPi));
}

inline double skew_normal_pdf(double v, double location, double scale, double shape) {
  const double z = (v - location) / scale;
  return 2.0 / scale * std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi) * 0.5 *
         std::erfc(-shape * z / std::sqrt(2.0));
}

/// Phase (2 pi / d) mu C / (m v^2).
inline double phase(double mu, double c, double v, double mass, double d) {
  return 2.0 * kPi / d * mu * c / (mass * v * v);
}

/// (1/N) | int rho(v) sum_states cos(phi_state(v)) dv | / int rho over
/// [lo, hi], by dense Simpson. `moments` in J/T.
inline double hyperfine_visibility(const std::function<double(double)>& rho,
                                   const std::vector<double>& moments, double c, double mass,
                                   double d, double lo, double hi, int panels) {
  auto integrand = [&](double v) {
    double sum = 0.0;
    for (const double mu : moments) sum += std::cos(phase(mu, c, v, mass, d));
    return rho(v) * sum / static_cast<double>(moments.size());
  };
  return std::abs(simpson(integrand, lo, hi, panels)) / simpson(rho, lo, hi, panels);
}

/// Most populated level of (2R+1) exp(-h c B R (R+1) / k T), by scanning.
inline int most_populated_level(double B_cm, double temperature) {
  const double energy = kPlanck * kLightSpeed * B_cm * 100.0 / (kBoltzmann * temperature);
  int best = 0;
  double best_weight = 1.0;
  for (int R = 1; R < 100000; ++R) {
    const double weight = (2.0 * R + 1.0) * std::exp(-energy * R * (R + 1.0));
    if (weight > best_weight) {
      best_weight = weight;
      best = R;
    }
  }
  return best;
}

/// Mean of cos(a M) for M uniform in [-R, R], by Simpson with many panels.
inline double m_average_simpson(double a, double R) {
  const int panels = 2 * static_cast<int>(std::ceil(std::abs(a) * R * 20.0)) + 200;
  return simpson([a](double M) { return std::cos(a * M); }, -R, R, panels) / (2.0 * R);
}

}  // namespace oracle
