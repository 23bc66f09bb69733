#pragma once

#include <complex>
#include <functional>
#include <span>

#include "fringemag/species.hpp"

namespace fringemag {

struct QuadratureOptions {
  double rel_tol = 1e-6;  // relative to the L1 norm of the integrand
  unsigned max_depth = 18;
  /// Phase |K|/v^2 (rad) above which phase_average switches from
  /// Gauss-Kronrod in v to a Fourier rule in 1/v^2.
  double fast_phase = 10.0;
};

/// Adaptive 15-point Gauss-Kronrod. Throws ConvergenceError if the error
/// estimate stays above tolerance at max_depth.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& options = {});

std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& f,
                                       double a, double b, const QuadratureOptions& options = {});

/// Integral of rho(v) f(v) over the support of the distribution, split at its
/// breakpoints. Discrete distributions give the weighted sum. When f
/// oscillates like a phase K / v^2, passing |K| as `phase_scale` splits the
/// range into one-cycle panels first.
double velocity_average(const VelocityDistribution& dist, const std::function<double(double)>& f,
                        const QuadratureOptions& options = {}, double phase_scale = 0.0);

std::complex<double> velocity_average_complex(const VelocityDistribution& dist,
                                              const std::function<std::complex<double>(double)>& f,
                                              const QuadratureOptions& options = {},
                                              double phase_scale = 0.0);

/// One term w exp(i K / v^2) of a phase-structured integrand.
struct PhaseTerm {
  double weight = 0.0;
  double K = 0.0;  // rad m^2 / s^2
};

/// Integral of rho(v) A(v) sum_j w_j exp(i K_j / v^2). All terms share one
/// adaptive Gauss-Kronrod pass down to the velocity where the slowest
/// non-zero phase reaches options.fast_phase; below it each term is taken in
/// w = 1/v^2, with a double exponential Fourier rule when the range in w is
/// unbounded. This stays accurate as v -> 0 where the phases diverge. An empty
/// `amplitude` means A = 1.
std::complex<double> phase_average(const VelocityDistribution& dist,
                                   const std::function<double(double)>& amplitude,
                                   std::span<const PhaseTerm> terms,
                                   const QuadratureOptions& options = {});

inline std::complex<double> phase_average(const VelocityDistribution& dist,
                                          const std::function<double(double)>& amplitude, double K,
                                          const QuadratureOptions& options = {}) {
  const PhaseTerm term{1.0, K};
  return phase_average(dist, amplitude, std::span<const PhaseTerm>(&term, 1), options);
}

}  // namespace fringemag
