#include "fringemag/species.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/skew_normal.hpp>
#include <cctype>
#include <cmath>
#include <numbers>

#include "fringemag/constants.hpp"
#include "fringemag/errors.hpp"

namespace fringemag {

namespace {

double standard_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

std::string lowercase(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Adds the m_F = 0 state and the +-m_F pairs of one F level. `sign` is the sign
// of mu_z for positive m_F; `step` is |mu_z| per unit |m_F|.
void add_level(HyperfineManifold& manifold, int F, double sign, double step) {
  manifold.states.push_back({F, 0, 0.0});
  for (int m = 1; m <= F; ++m) {
    manifold.states.push_back({F, m, sign * step * m});
    manifold.states.push_back({F, -m, -sign * step * m});
  }
}

// Energy of rotational level R in units of k_B T, for B in cm^-1.
double rotational_energy_over_kT(double B_cm, double temperature, double R) {
  using namespace constants;
  return planck * speed_of_light * B_cm * inverse_cm * R * (R + 1.0) / (boltzmann * temperature);
}

}  // namespace

HyperfineManifold builtin_manifold(Isotope isotope) {
  HyperfineManifold m;
  switch (isotope) {
    case Isotope::Cs133:
      m.isotope = "cs133";
      add_level(m, 3, -1.0, 0.25);
      add_level(m, 4, +1.0, 0.25);
      break;
    case Isotope::Rb85:
      m.isotope = "rb85";
      add_level(m, 2, -1.0, 1.0 / 3.0);
      add_level(m, 3, +1.0, 1.0 / 3.0);
      break;
    case Isotope::Rb87:
      m.isotope = "rb87";
      add_level(m, 1, -1.0, 0.5);
      add_level(m, 2, +1.0, 0.5);
      break;
  }
  return m;
}

HyperfineManifold builtin_manifold(std::string_view isotope) {
  const std::string key = lowercase(isotope);
  if (key == "cs133") return builtin_manifold(Isotope::Cs133);
  if (key == "rb85") return builtin_manifold(Isotope::Rb85);
  if (key == "rb87") return builtin_manifold(Isotope::Rb87);
  throw DomainError("unknown isotope '" + std::string(isotope) + "'");
}

double asymptote_fraction(const HyperfineManifold& manifold) {
  if (manifold.states.empty()) return 0.0;
  const auto zeros = std::count_if(manifold.states.begin(), manifold.states.end(),
                                   [](const HyperfineState& s) { return s.mu_z == 0.0; });
  return static_cast<double>(zeros) / manifold.size();
}

void RotorSpecies::validate() const {
  if (kind == RotorKind::Spherical && (g_xx != g_zz || g_yy != g_xx)) {
    throw DomainError("a spherical top has an isotropic g-tensor");
  }
  if ((A_cm && !(*A_cm > 0.0)) || (B_cm && !(*B_cm > 0.0))) {
    throw DomainError("rotational constants must be positive");
  }
  if (temperature < 0.0) throw DomainError("rotational temperature must be non-negative");
}

RotorSpecies builtin_rotor(std::string_view name) {
  const std::string key = lowercase(name);
  RotorSpecies r;
  if (key == "c60") {
    r.kind = RotorKind::Spherical;
    r.g_xx = r.g_yy = r.g_zz = -0.0141;
    r.B_cm = 0.0028;
    r.temperature = 870.0;
  } else if (key == "c70") {
    r.kind = RotorKind::SymmetricProlate;
    r.g_xx = r.g_yy = 0.0025;
    r.g_zz = -0.0046;
    r.A_cm = 0.0022;
    r.B_cm = 0.0019;
    r.temperature = 870.0;
  } else if (key == "tempo") {
    r.kind = RotorKind::Asymmetric;
    r.g_xx = -0.0098;
    r.g_yy = -0.0039;
    r.g_zz = -0.0104;
    r.temperature = 10.0;
  } else {
    throw DomainError("no built-in rotor named '" + std::string(name) + "'");
  }
  return r;
}

int r_max(double B_cm, double temperature) {
  if (!(B_cm > 0.0) || !(temperature > 0.0)) {
    throw DomainError("r_max needs a positive rotational constant and temperature");
  }
  // log-weight ln(2R+1) - E_R/kT is concave in R; the maximum sits next to the
  // continuous stationary point.
  const double x = rotational_energy_over_kT(B_cm, temperature, 1.0) / 2.0;  // hcB/kT
  const double stationary = 0.5 * (std::sqrt(2.0 / x) - 1.0);
  const int centre = std::max(0, static_cast<int>(std::floor(stationary)));
  auto log_weight = [&](int R) {
    return std::log(2.0 * R + 1.0) - rotational_energy_over_kT(B_cm, temperature, R);
  };
  int best = std::max(0, centre - 2);
  for (int R = best + 1; R <= centre + 3; ++R) {
    if (log_weight(R) > log_weight(best)) best = R;
  }
  return best;
}

std::vector<double> rotational_populations(double B_cm, double temperature) {
  const int peak = r_max(B_cm, temperature);
  auto log_weight = [&](int R) {
    return std::log(2.0 * R + 1.0) - rotational_energy_over_kT(B_cm, temperature, R);
  };
  const double top = log_weight(peak);
  std::vector<double> w;
  double total = 0.0;
  for (int R = 0;; ++R) {
    const double value = std::exp(log_weight(R) - top);
    w.push_back(value);
    total += value;
    if (R > peak && value < 1e-14) break;
  }
  for (auto& value : w) value /= total;
  return w;
}

double mu_rot_projection(double M, double K, double R, const RotorSpecies& rotor) {
  if (R == 0.0) {
    if (K != 0.0) throw DomainError("K must vanish for R = 0");
    return 0.0;
  }
  if (!(R > 0.0) || std::abs(K) > R || std::abs(M) > R) {
    throw DomainError("need R > 0, |K| <= R and |M| <= R");
  }
  if (rotor.kind == RotorKind::Spherical) return M * rotor.g_xx;
  return M * (rotor.g_xx + (rotor.g_zz - rotor.g_xx) * K * K / (R * (R + 1.0)));
}

VelocityDistribution::VelocityDistribution(Variant v) : dist_(std::move(v)) {
  std::visit(
      [this](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, SkewNormal>) {
          if (!(d.scale > 0.0)) throw DomainError("skew-normal scale must be positive");
          boost::math::skew_normal_distribution<double> dist(d.location, d.scale, d.shape);
          norm_ = boost::math::cdf(boost::math::complement(dist, 0.0));
          const double lower = boost::math::quantile(dist, 1e-11);
          support_ = {std::max(0.0, lower), d.location + 8.0 * d.scale};
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          if (!(d.sigma > 0.0)) throw DomainError("Gaussian sigma must be positive");
          boost::math::normal_distribution<double> dist(d.mean, d.sigma);
          norm_ = boost::math::cdf(boost::math::complement(dist, 0.0));
          support_ = {std::max(0.0, d.mean - 8.0 * d.sigma), d.mean + 8.0 * d.sigma};
        } else if constexpr (std::is_same_v<T, Discrete>) {
          if (d.velocities.empty() || d.velocities.size() != d.weights.size()) {
            throw DomainError("discrete distribution needs one weight per velocity");
          }
          double total = 0.0;
          for (std::size_t i = 0; i < d.weights.size(); ++i) {
            if (!(d.velocities[i] > 0.0)) throw DomainError("discrete velocities must be positive");
            if (d.weights[i] < 0.0) throw DomainError("discrete weights must be non-negative");
            total += d.weights[i];
          }
          if (!(total > 0.0)) throw DomainError("discrete distribution has no weight");
          const auto [lo, hi] = std::minmax_element(d.velocities.begin(), d.velocities.end());
          support_ = {*lo, *hi};
        } else {
          if (d.edges.size() < 2 || d.weights.size() + 1 != d.edges.size()) {
            throw DomainError("empirical distribution needs n+1 edges for n weights");
          }
          double mass = 0.0;
          for (std::size_t i = 0; i < d.weights.size(); ++i) {
            if (d.weights[i] < 0.0) throw DomainError("histogram weights must be non-negative");
            if (!(d.edges[i + 1] > d.edges[i])) throw DomainError("histogram edges must increase");
            const double lo = std::max(0.0, d.edges[i]);
            const double hi = std::max(0.0, d.edges[i + 1]);
            mass += d.weights[i] * (hi - lo) / (d.edges[i + 1] - d.edges[i]);
          }
          double total = 0.0;
          for (double w : d.weights) total += w;
          if (!(total > 0.0)) throw DomainError("histogram has no weight");
          norm_ = mass / total;
          support_ = {std::max(0.0, d.edges.front()), std::max(0.0, d.edges.back())};
        }
      },
      dist_);
  if (!(norm_ > 0.0)) throw DomainError("velocity distribution has no mass at v > 0");
}

double VelocityDistribution::raw_pdf(double v) const {
  return std::visit(
      [v](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, SkewNormal>) {
          // (2/w) phi(z) Phi(alpha z); same parameterisation as boost's
          // skew_normal_distribution, evaluated in double precision.
          const double z = (v - d.location) / d.scale;
          return 2.0 / d.scale * standard_normal_pdf(z) * 0.5 *
                 std::erfc(-d.shape * z / std::numbers::sqrt2);
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          return standard_normal_pdf((v - d.mean) / d.sigma) / d.sigma;
        } else if constexpr (std::is_same_v<T, Discrete>) {
          return 0.0;
        } else {
          if (v < d.edges.front() || v >= d.edges.back()) return 0.0;
          const auto it = std::upper_bound(d.edges.begin(), d.edges.end(), v);
          const auto bin = static_cast<std::size_t>(it - d.edges.begin()) - 1;
          double total = 0.0;
          for (double w : d.weights) total += w;
          return d.weights[bin] / total / (d.edges[bin + 1] - d.edges[bin]);
        }
      },
      dist_);
}

double VelocityDistribution::pdf(double v) const {
  if (v <= 0.0) return 0.0;
  return raw_pdf(v) / norm_;
}

std::pair<double, double> VelocityDistribution::support() const { return support_; }

std::vector<double> VelocityDistribution::breakpoints() const {
  std::vector<double> out;
  if (const auto* e = std::get_if<Empirical>(&dist_)) {
    for (std::size_t i = 1; i + 1 < e->edges.size(); ++i) {
      if (e->edges[i] > 0.0) out.push_back(e->edges[i]);
    }
  }
  return out;
}

std::vector<std::pair<double, double>> VelocityDistribution::atoms() const {
  std::vector<std::pair<double, double>> out;
  if (const auto* d = std::get_if<Discrete>(&dist_)) {
    double total = 0.0;
    for (double w : d->weights) total += w;
    for (std::size_t i = 0; i < d->velocities.size(); ++i) {
      out.emplace_back(d->velocities[i], d->weights[i] / total);
    }
  }
  return out;
}

double VelocityDistribution::typical_velocity() const {
  return std::visit(
      [](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, SkewNormal>) {
          return d.location;
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          return d.mean;
        } else if constexpr (std::is_same_v<T, Discrete>) {
          double sum = 0.0;
          double total = 0.0;
          for (std::size_t i = 0; i < d.velocities.size(); ++i) {
            sum += d.weights[i] * d.velocities[i];
            total += d.weights[i];
          }
          return sum / total;
        } else {
          return 0.5 * (d.edges.front() + d.edges.back());
        }
      },
      dist_);
}

void SpeciesModel::validate() const {
  if (!(mass > 0.0)) throw DomainError("species mass must be positive");
}

SpeciesModel builtin_species(std::string_view name) {
  using constants::atomic_mass_unit;
  const std::string key = lowercase(name);
  SpeciesModel s;
  s.name = key;
  if (key == "cs133") {
    s.mass = 132.905 * atomic_mass_unit;
    s.response.value = Hyperfine{builtin_manifold(Isotope::Cs133)};
    s.velocity = VelocityDistribution(SkewNormal{290.0, 171.0, 2.1});
  } else if (key == "rb85" || key == "rb87") {
    s.mass = (key == "rb85" ? 84.9118 : 86.9092) * atomic_mass_unit;
    s.response.value = Hyperfine{builtin_manifold(key)};
    s.velocity = VelocityDistribution(SkewNormal{425.0, 220.0, 1.7});
  } else if (key == "tempo") {
    s.mass = 156.25 * atomic_mass_unit;
    s.response.value = Magnetized{0.1};
    s.velocity = VelocityDistribution(Gaussian{694.0, 23.0});
  } else if (key == "c60") {
    s.mass = 720.00 * atomic_mass_unit;
    s.response.value = Rotor{builtin_rotor("c60")};
    s.velocity = VelocityDistribution(Gaussian{175.0, 50.0});
  } else if (key == "c70") {
    s.mass = 840.00 * atomic_mass_unit;
    s.response.value = Diamagnetic{};
    s.velocity = VelocityDistribution(Gaussian{162.0, 46.0});
  } else if (key == "c69c13") {
    s.mass = 841.00 * atomic_mass_unit;
    Composite parts;
    parts.parts.push_back(Response{Diamagnetic{}});
    parts.parts.push_back(Response{NuclearSpin{0.702, 2}});
    s.response.value = std::move(parts);
    s.velocity = VelocityDistribution(Gaussian{162.0, 46.0});
  } else {
    throw DomainError("unknown species '" + std::string(name) + "'");
  }
  return s;
}

double langevin_mu_eff(double mu, double B, double temperature, double kappa) {
  if (!(temperature > 0.0)) throw DomainError("temperature must be positive");
  return kappa * mu * mu * B / (constants::boltzmann * temperature);
}

}  // namespace fringemag
