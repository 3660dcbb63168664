#pragma once

// Physical constants (SI, 2019 exact values where defined) and the default
// atom/laser parameters used throughout the library.

namespace latline {

inline constexpr double planck_h = 6.62607015e-34;       // J s
inline constexpr double boltzmann_kb = 1.380649e-23;     // J / K
inline constexpr double speed_of_light = 2.99792458e8;   // m / s

// Default species: 85Rb trapped by light near the D2 line.
inline constexpr double rb85_mass_kg = 1.4100e-25;
inline constexpr double rb85_d2_wavelength_m = 780.241e-9;

// Photon-recoil frequency h / (2 m lambda^2) in Hz.
constexpr double recoil_frequency_hz(double mass_kg, double wavelength_m) {
    return planck_h / (2.0 * mass_kg * wavelength_m * wavelength_m);
}

}  // namespace latline
