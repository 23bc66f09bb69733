#include "fringemag/visibility.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <complex>
#include <map>

#include "fringemag/constants.hpp"
#include "fringemag/errors.hpp"

namespace fringemag {

namespace {

using constants::bohr_magneton;
using constants::nuclear_magneton;
using constants::pi;

// Distinct |mu| values (J/T) of a symmetric response with their state counts;
// +-mu pairs give identical cosines.
struct CosineTerms {
  std::vector<std::pair<double, double>> terms;  // (|mu|, count)
  double states = 0.0;

  double mean_cos(double c_total, double v, double mass, double d) const {
    double sum = 0.0;
    for (const auto& [mu, count] : terms) {
      sum += count * std::cos(phase_shift(mu, c_total, v, mass, d));
    }
    return sum / states;
  }

  double fastest(double c_total, double mass, double d) const {
    double k = 0.0;
    for (const auto& term : terms)
      k = std::max(k, std::abs(phase_shift(term.first, c_total, 1.0, mass, d)));
    return k;
  }
};

CosineTerms hyperfine_terms(const HyperfineManifold& manifold) {
  if (manifold.states.empty()) throw DomainError("hyperfine manifold has no states");
  std::map<double, double> counts;
  for (const auto& s : manifold.states) counts[std::abs(s.mu_z) * bohr_magneton] += 1.0;
  CosineTerms out;
  out.states = manifold.size();
  out.terms.assign(counts.begin(), counts.end());
  return out;
}

CosineTerms nuclear_terms(const NuclearSpin& spin) {
  if (spin.multiplicity < 1) throw DomainError("nuclear spin multiplicity must be positive");
  CosineTerms out;
  out.states = spin.multiplicity;
  const int n = spin.multiplicity;
  for (int k = 0; k < n; ++k) {
    const double fraction = n == 1 ? 0.0 : 1.0 - 2.0 * k / (n - 1);
    out.terms.emplace_back(std::abs(fraction) * spin.mu_nuclear * nuclear_magneton, 1.0);
  }
  return out;
}

double amplitude_at(const PhaseContext& ctx, double v) {
  if (!ctx.amplitude) return 1.0;
  const double a = ctx.amplitude(v);
  if (!(a >= 0.0 && a <= 1.0)) throw DomainError("amplitude function must stay within [0, 1]");
  return a;
}

double chi_of(const Diamagnetic& dia) {
  if (!dia.chi_m) throw DomainError("mass susceptibility chi_m is not configured");
  return *dia.chi_m;
}

// Probability mass seen by the quadrature; dividing by it makes C = 0 give 1.
double velocity_mass(const PhaseContext& ctx) {
  return velocity_average(
      ctx.species.velocity, [&](double v) { return amplitude_at(ctx, v); }, ctx.quadrature);
}

double finish(double magnitude, double mass) {
  if (!(mass > 0.0)) throw DomainError("velocity distribution has no weight");
  return std::clamp(magnitude / mass, 0.0, 1.0);
}

// Integrand sum_j weight_j exp(i K_j / v^2); every non-rotor model reduces to
// this form because all phases scale as 1/v^2.
using PhaseTerms = std::vector<PhaseTerm>;

void multiply(PhaseTerms& terms, const CosineTerms& factor, double unit_K) {
  PhaseTerms out;
  for (const auto& t : terms) {
    for (const auto& [mu, count] : factor.terms) {
      const double w = t.weight * count / factor.states;
      const double k = mu * unit_K;
      if (k == 0.0) {
        out.push_back({w, t.K});
      } else {
        out.push_back({0.5 * w, t.K + k});
        out.push_back({0.5 * w, t.K - k});
      }
    }
  }
  std::map<double, double> merged;
  for (const auto& t : out) merged[t.K] += t.weight;
  terms.clear();
  for (const auto& [K, w] : merged) terms.push_back({w, K});
}

double evaluate(const PhaseContext& ctx, const PhaseTerms& terms) {
  const std::function<double(double)> amp = [&](double v) { return amplitude_at(ctx, v); };
  const std::complex<double> sum = phase_average(ctx.species.velocity, amp, terms, ctx.quadrature);
  return finish(std::abs(sum),
                phase_average(ctx.species.velocity, amp, 0.0, ctx.quadrature).real());
}

double rotational_factor(const PhaseContext& ctx, const RotorSpecies& rotor, int r_max,
                         const RotationalOptions& options, double v,
                         const std::vector<double>* populations) {
  if (rotor.kind != RotorKind::Spherical) {
    throw DomainError("rotational visibility model requires a spherical top");
  }
  const double a = phase_shift(rotor.g_xx * nuclear_magneton, ctx.c_total(), v, ctx.species.mass,
                               ctx.geometry.d);
  auto inner = [&](int R) {
    switch (options.m_integration) {
      case MIntegration::Numeric:
        return m_average_numeric(a, R);
      case MIntegration::DiscreteSum:
        return m_average_discrete(a, R);
      case MIntegration::ClosedForm:
        break;
    }
    return m_average_closed(a, R);
  };
  if (!populations) return inner(r_max);
  double sum = 0.0;
  for (std::size_t R = 0; R < populations->size(); ++R) {
    sum += (*populations)[R] * (R == 0 ? 1.0 : inner(static_cast<int>(R)));
  }
  return sum;
}

int rotor_r_max(const RotorSpecies& rotor) {
  if (!rotor.B_cm) throw DomainError("rotor has no rotational constant");
  return r_max(*rotor.B_cm, rotor.temperature);
}

// Coefficient K of the fastest sinc argument K / v^2 over M in [-R, R].
double rotor_phase_scale(const PhaseContext& ctx, const RotorSpecies& rotor, int R) {
  return std::abs(phase_shift(rotor.g_xx * nuclear_magneton, ctx.c_total(), 1.0, ctx.species.mass,
                              ctx.geometry.d)) *
         R;
}

// Direct velocity quadrature of the full integrand; needed when a rotor factor
// (a sinc, not a sum of exponentials) is present.
double composite_generic(const PhaseContext& ctx, std::span<const Response> parts,
                         const RotationalOptions& options) {
  // Per-part evaluators. One-sided parts return a phase, symmetric parts a
  // real factor.
  std::vector<std::function<double(double)>> phases;
  std::vector<std::function<double(double)>> factors;
  std::vector<CosineTerms> cosine_terms;
  cosine_terms.reserve(parts.size());
  const double mass = ctx.species.mass;
  const double d = ctx.geometry.d;
  const double c_total = ctx.c_total();
  // Sum of the parts' fastest phase coefficients: bounds the integrand's
  // oscillation rate in 1/v^2.
  double phase_scale = 0.0;

  for (const auto& part : parts) {
    std::visit(
        [&](const auto& r) {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, Magnetized>) {
            const double mu = r.mu_eff * bohr_magneton;
            phase_scale += std::abs(phase_shift(mu, c_total, 1.0, mass, d));
            phases.push_back([=](double v) { return phase_shift(mu, c_total, v, mass, d); });
          } else if constexpr (std::is_same_v<T, Diamagnetic>) {
            const double chi = chi_of(r);
            const double c_ind = ctx.c_induced;
            phase_scale += std::abs(induced_phase_shift(chi, c_ind, 1.0, d));
            phases.push_back([=](double v) { return induced_phase_shift(chi, c_ind, v, d); });
          } else if constexpr (std::is_same_v<T, Hyperfine>) {
            cosine_terms.push_back(hyperfine_terms(r.manifold));
            const CosineTerms* t = &cosine_terms.back();
            phase_scale += t->fastest(c_total, mass, d);
            factors.push_back([=](double v) { return t->mean_cos(c_total, v, mass, d); });
          } else if constexpr (std::is_same_v<T, NuclearSpin>) {
            cosine_terms.push_back(nuclear_terms(r));
            const CosineTerms* t = &cosine_terms.back();
            phase_scale += t->fastest(c_total, mass, d);
            factors.push_back([=](double v) { return t->mean_cos(c_total, v, mass, d); });
          } else if constexpr (std::is_same_v<T, Rotor>) {
            const RotorSpecies rotor = r.rotor;
            const int rm = rotor_r_max(rotor);
            phase_scale += rotor_phase_scale(ctx, rotor, rm);
            factors.push_back([&ctx, rotor, rm, options](double v) {
              return rotational_factor(ctx, rotor, rm,
                                       RotationalOptions{options.m_integration, false}, v, nullptr);
            });
          } else {
            throw DomainError("composite parts cannot themselves be composite");
          }
        },
        part.value);
  }

  auto symmetric = [&](double v) {
    double f = amplitude_at(ctx, v);
    for (const auto& factor : factors) f *= factor(v);
    return f;
  };

  double magnitude = 0.0;
  if (phases.empty()) {
    magnitude =
        std::abs(velocity_average(ctx.species.velocity, symmetric, ctx.quadrature, phase_scale));
  } else {
    const std::function<std::complex<double>(double)> integrand = [&](double v) {
      double phi = 0.0;
      for (const auto& phase : phases) phi += phase(v);
      return symmetric(v) * std::polar(1.0, phi);
    };
    magnitude = std::abs(
        velocity_average_complex(ctx.species.velocity, integrand, ctx.quadrature, phase_scale));
  }
  return finish(magnitude, velocity_mass(ctx));
}

}  // namespace

double phase_shift(double mu, double c_total, double v, double mass, double d) {
  if (!(v > 0.0)) throw DomainError("velocity must be positive");
  if (!(mass > 0.0) || !(d > 0.0)) throw DomainError("mass and grating period must be positive");
  return 2.0 * pi / d * mu * c_total / (mass * v * v);
}

double induced_phase_shift(double chi_m, double c_induced, double v, double d) {
  if (!(v > 0.0)) throw DomainError("velocity must be positive");
  if (!(d > 0.0)) throw DomainError("grating period must be positive");
  return 2.0 * pi / d * chi_m / constants::mu0 * c_induced / (v * v);
}

double visibility_hyperfine(const PhaseContext& ctx) {
  const auto* hf = std::get_if<Hyperfine>(&ctx.species.response.value);
  if (!hf) throw DomainError("species has no hyperfine manifold");
  PhaseTerms terms{{1.0, 0.0}};
  multiply(terms, hyperfine_terms(hf->manifold),
           phase_shift(1.0, ctx.c_total(), 1.0, ctx.species.mass, ctx.geometry.d));
  return evaluate(ctx, terms);
}

double m_average_closed(double a, double R) {
  const double x = a * R;
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

double m_average_numeric(double a, double R) {
  if (!(R > 0.0)) throw DomainError("R must be positive");
  using Rule = boost::math::quadrature::gauss<double, 20>;
  // cos(aM) is even: (1/2R) int_{-R}^{R} = (1/R) int_0^R. Panels resolve each
  // half period.
  const int n = 1 + static_cast<int>(std::ceil(std::abs(a) * R / pi));
  const double width = R / n;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double lo = k * width;
    sum += Rule::integrate([a](double M) { return std::cos(a * M); }, lo, lo + width);
  }
  return sum / R;
}

double m_average_discrete(double a, int R) {
  if (R < 0) throw DomainError("R must be non-negative");
  double sum = 1.0;
  for (int M = 1; M <= R; ++M) sum += 2.0 * std::cos(a * M);
  return sum / (2.0 * R + 1.0);
}

double visibility_rotational(const PhaseContext& ctx, int r_max, const RotationalOptions& options) {
  if (r_max <= 0) throw DomainError("R_max must be positive");
  const auto* rot = std::get_if<Rotor>(&ctx.species.response.value);
  if (!rot) throw DomainError("species is not a rotor");
  std::vector<double> populations;
  if (options.boltzmann_average) {
    if (!rot->rotor.B_cm) throw DomainError("Boltzmann average needs a rotational constant");
    populations = rotational_populations(*rot->rotor.B_cm, rot->rotor.temperature);
  }
  const auto* pops = options.boltzmann_average ? &populations : nullptr;
  const int r_top = pops ? static_cast<int>(pops->size()) - 1 : r_max;
  const double value = velocity_average(
      ctx.species.velocity,
      [&](double v) {
        return amplitude_at(ctx, v) * rotational_factor(ctx, rot->rotor, r_max, options, v, pops);
      },
      ctx.quadrature, rotor_phase_scale(ctx, rot->rotor, r_top));
  return finish(std::abs(value), velocity_mass(ctx));
}

double visibility_one_sided(const PhaseContext& ctx) {
  const auto& response = ctx.species.response.value;
  if (!std::holds_alternative<Magnetized>(response) &&
      !std::holds_alternative<Diamagnetic>(response)) {
    throw DomainError("one-sided model needs a magnetized or diamagnetic species");
  }
  return visibility_composite(ctx, std::span<const Response>(&ctx.species.response, 1));
}

double visibility_composite(const PhaseContext& ctx, std::span<const Response> parts,
                            const RotationalOptions& options) {
  if (parts.empty()) throw DomainError("composite model needs at least one part");
  for (const auto& part : parts) {
    if (std::holds_alternative<Composite>(part.value)) {
      throw DomainError("composite parts cannot themselves be composite");
    }
  }
  const bool has_rotor = std::any_of(parts.begin(), parts.end(), [](const Response& r) {
    return std::holds_alternative<Rotor>(r.value);
  });
  if (has_rotor) return composite_generic(ctx, parts, options);

  const double mass = ctx.species.mass;
  const double d = ctx.geometry.d;
  const double unit_K = phase_shift(1.0, ctx.c_total(), 1.0, mass, d);
  double one_sided_K = 0.0;
  for (const auto& part : parts) {
    if (const auto* m = std::get_if<Magnetized>(&part.value)) {
      one_sided_K += m->mu_eff * bohr_magneton * unit_K;
    } else if (const auto* dia = std::get_if<Diamagnetic>(&part.value)) {
      one_sided_K += induced_phase_shift(chi_of(*dia), ctx.c_induced, 1.0, d);
    }
  }
  PhaseTerms terms{{1.0, one_sided_K}};
  for (const auto& part : parts) {
    if (const auto* hf = std::get_if<Hyperfine>(&part.value)) {
      multiply(terms, hyperfine_terms(hf->manifold), unit_K);
    } else if (const auto* spin = std::get_if<NuclearSpin>(&part.value)) {
      multiply(terms, nuclear_terms(*spin), unit_K);
    }
  }
  return evaluate(ctx, terms);
}

double visibility(const PhaseContext& ctx, const RotationalOptions& options) {
  const auto& response = ctx.species.response.value;
  if (std::holds_alternative<Hyperfine>(response)) return visibility_hyperfine(ctx);
  if (const auto* rot = std::get_if<Rotor>(&response)) {
    return visibility_rotational(ctx, rotor_r_max(rot->rotor), options);
  }
  if (std::holds_alternative<Magnetized>(response) ||
      std::holds_alternative<Diamagnetic>(response)) {
    return visibility_one_sided(ctx);
  }
  if (const auto* composite = std::get_if<Composite>(&response)) {
    return visibility_composite(ctx, composite->parts, options);
  }
  return visibility_composite(ctx, std::span<const Response>(&ctx.species.response, 1), options);
}

std::string describe(const Response& response) {
  return std::visit(
      [](const auto& r) -> std::string {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Hyperfine>) {
          return "hyperfine(" + r.manifold.isotope + ")";
        } else if constexpr (std::is_same_v<T, Rotor>) {
          return "rotational";
        } else if constexpr (std::is_same_v<T, Diamagnetic>) {
          return "diamagnetic";
        } else if constexpr (std::is_same_v<T, Magnetized>) {
          return "magnetized";
        } else if constexpr (std::is_same_v<T, NuclearSpin>) {
          return "nuclear-spin";
        } else {
          std::string out = "composite(";
          for (std::size_t i = 0; i < r.parts.size(); ++i) {
            if (i) out += "+";
            out += describe(r.parts[i]);
          }
          return out + ")";
        }
      },
      response.value);
}

}  // namespace fringemag
