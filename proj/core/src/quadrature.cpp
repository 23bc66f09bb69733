#include "fringemag/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <type_traits>
#include <vector>

#include "fringemag/constants.hpp"
#include "fringemag/errors.hpp"

namespace fringemag {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;

constexpr double kMaxPanelCycles = 2e4;
constexpr double kFourierTolerance = 1e-9;
constexpr std::size_t kFourierLevels = 2;  // built eagerly; up to four more are added on demand

constexpr int kMaxPhasePanels = 4096;

// Panel boundaries on [lo, hi]: density breakpoints plus, for a phase K / v^2,
// one boundary per cycle so that no Gauss-Kronrod panel starts out aliased.
// Below the last cut (at most kMaxPhasePanels cycles) the panel is left whole.
std::vector<double> panels(const VelocityDistribution& dist, double lo, double hi, double K = 0.0) {
  std::vector<double> cuts{lo, hi};
  for (double b : dist.breakpoints()) {
    if (b > lo && b < hi) cuts.push_back(b);
  }
  if (K != 0.0) {
    const double w_hi = 1.0 / (hi * hi);
    const double w_lo = lo > 0.0 ? 1.0 / (lo * lo) : INFINITY;
    const double step = 2.0 * constants::pi / std::abs(K);
    for (int k = 1; k <= kMaxPhasePanels; ++k) {
      const double w = w_hi + k * step;
      if (w >= w_lo) break;
      cuts.push_back(1.0 / std::sqrt(w));
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

constexpr std::size_t kMaxAdaptivePanels = 20000;

// Globally adaptive Gauss-Kronrod: the panel with the largest error estimate
// is bisected until the summed error drops below rel_tol times the summed L1
// norm. Panels at roundoff level or at max_depth are retired. Boost's own
// recursion measures the error against the integral itself, which never
// settles when an oscillating panel cancels to almost nothing.
template <class T>
T adaptive(const std::function<T(double)>& f, const std::vector<double>& cuts,
           const QuadratureOptions& options) {
  struct Panel {
    double a, b;
    T value;
    double error, l1;
    unsigned depth;
  };
  auto evaluate = [&](double lo, double hi, unsigned depth) {
    Panel p{lo, hi, T{}, 0.0, 0.0, depth};
    p.value = Rule::integrate(f, lo, hi, 0, 0.0, &p.error, &p.l1);
    p.error *= 0.5 * (hi - lo);  // Boost reports the error on the reference interval
    return p;
  };
  auto by_error = [](const Panel& x, const Panel& y) { return x.error < y.error; };
  std::vector<Panel> open;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i] != cuts[i + 1]) open.push_back(evaluate(cuts[i], cuts[i + 1], 0));
  }
  if (open.empty()) return T{};
  std::make_heap(open.begin(), open.end(), by_error);
  const std::size_t max_panels = open.size() + kMaxAdaptivePanels;
  std::vector<Panel> retired;
  auto totals = [&] {
    double error = 0.0;
    double l1 = 0.0;
    for (const auto* list : {&open, &retired}) {
      for (const auto& p : *list) {
        error += p.error;
        l1 += p.l1;
      }
    }
    return std::pair{error, l1};
  };
  for (;;) {
    const auto [error, l1] = totals();
    if (open.empty() || error <= options.rel_tol * l1) break;
    if (open.size() + retired.size() >= max_panels) break;
    std::pop_heap(open.begin(), open.end(), by_error);
    const Panel worst = open.back();
    open.pop_back();
    if (worst.depth >= options.max_depth ||
        worst.error <= 64.0 * std::numeric_limits<double>::epsilon() * worst.l1) {
      retired.push_back(worst);
      continue;
    }
    const double m = 0.5 * (worst.a + worst.b);
    for (const Panel& half :
         {evaluate(worst.a, m, worst.depth + 1), evaluate(m, worst.b, worst.depth + 1)}) {
      open.push_back(half);
      std::push_heap(open.begin(), open.end(), by_error);
    }
  }
  std::sort(open.begin(), open.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  std::sort(retired.begin(), retired.end(),
            [](const Panel& x, const Panel& y) { return x.a < y.a; });
  T value{};
  for (const auto* list : {&open, &retired}) {
    for (const auto& p : *list) value += p.value;
  }
  const auto [error, l1] = totals();
  if (!std::isfinite(std::abs(value))) {
    throw ConvergenceError("quadrature produced a non-finite value");
  }
  if (error > 10.0 * options.rel_tol * l1 && error > 1e-14) {
    throw ConvergenceError("adaptive quadrature did not reach the requested tolerance");
  }
  return value;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& options) {
  return adaptive(f, {a, b}, options);
}

std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& f,
                                       double a, double b, const QuadratureOptions& options) {
  return adaptive(f, {a, b}, options);
}

double velocity_average(const VelocityDistribution& dist, const std::function<double(double)>& f,
                        const QuadratureOptions& options, double phase_scale) {
  if (dist.is_discrete()) {
    double total = 0.0;
    for (const auto& [v, w] : dist.atoms()) total += w * f(v);
    return total;
  }
  const auto [lo, hi] = dist.support();
  const std::function<double(double)> g = [&](double v) { return dist.pdf(v) * f(v); };
  return adaptive(g, panels(dist, lo, hi, phase_scale), options);
}

std::complex<double> velocity_average_complex(const VelocityDistribution& dist,
                                              const std::function<std::complex<double>(double)>& f,
                                              const QuadratureOptions& options,
                                              double phase_scale) {
  if (dist.is_discrete()) {
    std::complex<double> total = 0.0;
    for (const auto& [v, w] : dist.atoms()) total += w * f(v);
    return total;
  }
  const auto [lo, hi] = dist.support();
  const std::function<std::complex<double>(double)> g = [&](double v) {
    return dist.pdf(v) * f(v);
  };
  return adaptive(g, panels(dist, lo, hi, phase_scale), options);
}

namespace {

using boost::math::quadrature::ooura_fourier_cos;
using boost::math::quadrature::ooura_fourier_sin;

// Fourier rules shared by the terms of one phase_average call. The Boost rules
// remember their last refinement level, so they are never shared between
// calls: results must not depend on evaluation order.
struct FourierRules {
  std::optional<ooura_fourier_cos<double>> cos_rule;
  std::optional<ooura_fourier_sin<double>> sin_rule;
};

// Integral of rho A exp(i K / v^2) over v in [lo, hi] with hi <= the fast-phase
// split, computed in w = 1/v^2 where dv = -w^{-3/2} dw / 2.
std::complex<double> fast_region(const VelocityDistribution& dist,
                                 const std::function<double(double)>& weight, double K, double lo,
                                 double hi, const QuadratureOptions& options, FourierRules& rules) {
  const double w0 = 1.0 / (hi * hi);
  const double w_end = lo > 0.0 ? 1.0 / (lo * lo) : INFINITY;
  auto g = [&](double t) {
    const double w = w0 + t;
    if (w >= w_end) return 0.0;
    const double v = 1.0 / std::sqrt(w);
    return 0.5 * dist.pdf(v) * weight(v) * v * v * v;
  };
  if (K == 0.0) {
    return integrate([&](double v) { return dist.pdf(v) * weight(v); }, lo, hi, options);
  }
  const double omega = std::abs(K);
  const double sign = K < 0.0 ? -1.0 : 1.0;
  const double cycles = omega * (w_end - w0) / (2.0 * constants::pi);
  if (cycles <= kMaxPanelCycles) {
    // Bounded range (histograms, truncated densities): panels of two
    // periods in w, cut at the mapped breakpoints.
    std::vector<double> cuts{w0};
    const int n = 1 + static_cast<int>(cycles / 2.0);
    for (int k = 1; k < n; ++k) cuts.push_back(w0 + (w_end - w0) * k / n);
    for (double b : dist.breakpoints()) {
      if (b > lo && b < hi) cuts.push_back(1.0 / (b * b));
    }
    cuts.push_back(w_end);
    std::sort(cuts.begin(), cuts.end());
    const std::function<std::complex<double>(double)> h = [&](double w) {
      return g(w - w0) * std::polar(1.0, K * w);
    };
    return adaptive(h, cuts, options);
  }
  auto fourier = [&](auto& rule) {
    auto [value, rel] = rule.integrate(g, omega);
    double abs_error = rel * std::abs(value);
    if (!std::isfinite(abs_error)) {
      // No relative convergence, typically because the integral cancels to
      // ~0. Compare against a finer rule instead.
      std::remove_reference_t<decltype(rule)> finer(kFourierTolerance, kFourierLevels + 4);
      abs_error = std::abs(finer.integrate(g, omega).first - value);
    }
    if (!std::isfinite(value) ||
        !(abs_error <= 10.0 * options.rel_tol * std::max(std::abs(value), 1e-6))) {
      throw ConvergenceError("Fourier quadrature did not reach the requested tolerance");
    }
    return value;
  };
  if (!rules.cos_rule) rules.cos_rule.emplace(kFourierTolerance, kFourierLevels);
  if (!rules.sin_rule) rules.sin_rule.emplace(kFourierTolerance, kFourierLevels);
  const double c = fourier(*rules.cos_rule);
  const double s = fourier(*rules.sin_rule);
  return std::polar(1.0, K * w0) * std::complex<double>(c, sign * s);
}

}  // namespace

std::complex<double> phase_average(const VelocityDistribution& dist,
                                   const std::function<double(double)>& amplitude,
                                   std::span<const PhaseTerm> terms,
                                   const QuadratureOptions& options) {
  const std::function<double(double)> weight = [&](double v) {
    return amplitude ? amplitude(v) : 1.0;
  };
  auto integrand = [&](double v) {
    std::complex<double> sum = 0.0;
    const double u = 1.0 / (v * v);
    for (const auto& t : terms) sum += t.weight * std::polar(1.0, t.K * u);
    return sum;
  };
  if (dist.is_discrete()) {
    std::complex<double> total = 0.0;
    for (const auto& [v, w] : dist.atoms()) total += w * weight(v) * integrand(v);
    return total;
  }

  double slowest = INFINITY;
  double fastest = 0.0;
  for (const auto& t : terms) {
    if (t.K != 0.0) slowest = std::min(slowest, std::abs(t.K));
    fastest = std::max(fastest, std::abs(t.K));
  }
  const auto [lo, hi] = dist.support();
  const double split = std::isfinite(slowest) ? std::sqrt(slowest / options.fast_phase) : 0.0;

  std::complex<double> total = 0.0;
  const double slow_lo = std::max(lo, split);
  if (slow_lo < hi) {
    const std::function<std::complex<double>(double)> f = [&](double v) {
      return dist.pdf(v) * weight(v) * integrand(v);
    };
    total += adaptive(f, panels(dist, slow_lo, hi, fastest), options);
  }
  if (split > lo) {
    const double top = std::min(split, hi);
    // J(-K) = conj J(K): ± pairs share one evaluation.
    std::map<double, std::complex<double>> cache;
    FourierRules rules;
    for (const auto& t : terms) {
      const double key = std::abs(t.K);
      auto it = cache.find(key);
      if (it == cache.end()) {
        it = cache.emplace(key, fast_region(dist, weight, key, lo, top, options, rules)).first;
      }
      total += t.weight * (t.K < 0.0 ? std::conj(it->second) : it->second);
    }
  }
  return total;
}

}  // namespace fringemag
