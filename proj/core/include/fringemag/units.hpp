#pragma once

#include <string>
#include <string_view>

namespace fringemag::units {

/// Physical dimension a quantity string must carry.
enum class Dimension {
  Dimensionless,
  Length,
  MagneticField,
  FieldGradient,
  Current,
  Velocity,
  Angle,
  Temperature,
  Mass,
  Wavenumber,
  MagneticMoment,
  MassSusceptibility,
  FieldLength,  // T m, the unit of a permanent-moment C-factor
};

std::string_view to_string(Dimension dim);

/// Parses "<number> [unit]" into SI. A bare number is taken to be SI already.
/// Recognised units include m, cm, mm, um, nm, T, mT, G, T/m, G/m, G/cm, A, mA,
/// m/s, deg, rad, K, kg, u, cm^-1, J/T, mu_B, mu_N, m^3/kg, T*m, G*m.
/// Throws std::invalid_argument on a malformed number, an unknown unit, or a
/// unit of the wrong dimension.
double parse_quantity(std::string_view text, Dimension expected);

}  // namespace fringemag::units
