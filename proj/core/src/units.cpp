#include "fringemag/units.hpp"

#include <charconv>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "fringemag/constants.hpp"

namespace fringemag::units {

namespace {

struct UnitDef {
  double factor;
  Dimension dim;
};

const std::unordered_map<std::string, UnitDef>& table() {
  using D = Dimension;
  using namespace constants;
  static const std::unordered_map<std::string, UnitDef> units = {
      {"m", {1.0, D::Length}},
      {"cm", {1e-2, D::Length}},
      {"mm", {1e-3, D::Length}},
      {"um", {1e-6, D::Length}},
      {"µm", {1e-6, D::Length}},
      {"nm", {1e-9, D::Length}},
      {"T", {1.0, D::MagneticField}},
      {"mT", {1e-3, D::MagneticField}},
      {"uT", {1e-6, D::MagneticField}},
      {"G", {gauss, D::MagneticField}},
      {"mG", {1e-3 * gauss, D::MagneticField}},
      {"T/m", {1.0, D::FieldGradient}},
      {"mT/m", {1e-3, D::FieldGradient}},
      {"G/m", {gauss, D::FieldGradient}},
      {"G/cm", {gauss * 100.0, D::FieldGradient}},
      {"T/cm", {100.0, D::FieldGradient}},
      {"A", {1.0, D::Current}},
      {"mA", {1e-3, D::Current}},
      {"m/s", {1.0, D::Velocity}},
      {"km/s", {1e3, D::Velocity}},
      {"rad", {1.0, D::Angle}},
      {"mrad", {1e-3, D::Angle}},
      {"deg", {degree, D::Angle}},
      {"°", {degree, D::Angle}},
      {"K", {1.0, D::Temperature}},
      {"kg", {1.0, D::Mass}},
      {"u", {atomic_mass_unit, D::Mass}},
      {"amu", {atomic_mass_unit, D::Mass}},
      {"Da", {atomic_mass_unit, D::Mass}},
      {"cm^-1", {inverse_cm, D::Wavenumber}},
      {"1/cm", {inverse_cm, D::Wavenumber}},
      {"m^-1", {1.0, D::Wavenumber}},
      {"1/m", {1.0, D::Wavenumber}},
      {"J/T", {1.0, D::MagneticMoment}},
      {"mu_B", {bohr_magneton, D::MagneticMoment}},
      {"muB", {bohr_magneton, D::MagneticMoment}},
      {"μB", {bohr_magneton, D::MagneticMoment}},
      {"mu_N", {nuclear_magneton, D::MagneticMoment}},
      {"muN", {nuclear_magneton, D::MagneticMoment}},
      {"μN", {nuclear_magneton, D::MagneticMoment}},
      {"m^3/kg", {1.0, D::MassSusceptibility}},
      {"m3/kg", {1.0, D::MassSusceptibility}},
      {"cm^3/g", {1e-3, D::MassSusceptibility}},
      {"cm3/g", {1e-3, D::MassSusceptibility}},
      {"T*m", {1.0, D::FieldLength}},
      {"G*m", {gauss, D::FieldLength}},
      {"G*cm", {gauss * 1e-2, D::FieldLength}},
  };
  return units;
}

std::string normalize_unit(std::string_view text) {
  // "G m", "G·m" and "G*m" are one unit; spaces around '/' are dropped.
  std::string out;
  bool pending_space = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == ' ' || c == '\t') {
      pending_space = !out.empty();
      continue;
    }
    if (text.substr(i, 2) == "·") {
      out += '*';
      ++i;
      pending_space = false;
      continue;
    }
    if (pending_space && c != '/' && out.back() != '/' && out.back() != '*' && c != '*') {
      out += '*';
    }
    pending_space = false;
    out += c;
  }
  return out;
}

}  // namespace

std::string_view to_string(Dimension dim) {
  switch (dim) {
    case Dimension::Dimensionless:
      return "dimensionless";
    case Dimension::Length:
      return "length";
    case Dimension::MagneticField:
      return "magnetic field";
    case Dimension::FieldGradient:
      return "field gradient";
    case Dimension::Current:
      return "current";
    case Dimension::Velocity:
      return "velocity";
    case Dimension::Angle:
      return "angle";
    case Dimension::Temperature:
      return "temperature";
    case Dimension::Mass:
      return "mass";
    case Dimension::Wavenumber:
      return "wavenumber";
    case Dimension::MagneticMoment:
      return "magnetic moment";
    case Dimension::MassSusceptibility:
      return "mass susceptibility";
    case Dimension::FieldLength:
      return "field times length";
  }
  return "unknown";
}

double parse_quantity(std::string_view text, Dimension expected) {
  const auto first = text.find_first_not_of(" \t");
  if (first == std::string_view::npos) throw std::invalid_argument("empty quantity");
  text.remove_prefix(first);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);

  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc()) {
    throw std::invalid_argument("malformed number in '" + std::string(text) + "'");
  }
  const std::string unit = normalize_unit(text.substr(static_cast<std::size_t>(ptr - text.data())));
  if (unit.empty()) return value;

  const auto it = table().find(unit);
  if (it == table().end()) throw std::invalid_argument("unknown unit '" + unit + "'");
  if (it->second.dim != expected) {
    throw std::invalid_argument("unit '" + unit + "' is a " +
                                std::string(to_string(it->second.dim)) + ", expected a " +
                                std::string(to_string(expected)));
  }
  return value * it->second.factor;
}

}  // namespace fringemag::units
