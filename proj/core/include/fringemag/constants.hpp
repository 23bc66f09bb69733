#pragma once

// CODATA 2018 values, SI units throughout.
namespace fringemag::constants {

inline constexpr double pi = 3.14159265358979323846;

inline constexpr double mu0 = 1.25663706212e-6;                // T m / A
inline constexpr double bohr_magneton = 9.2740100783e-24;      // J / T
inline constexpr double nuclear_magneton = 5.0507837461e-27;   // J / T
inline constexpr double boltzmann = 1.380649e-23;              // J / K
inline constexpr double planck = 6.62607015e-34;               // J s
inline constexpr double speed_of_light = 2.99792458e8;         // m / s
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg

// Non-SI units accepted at I/O boundaries.
inline constexpr double gauss = 1e-4;         // T
inline constexpr double inverse_cm = 100.0;   // 1/m
inline constexpr double degree = pi / 180.0;  // rad

}  // namespace fringemag::constants
