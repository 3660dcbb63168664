#pragma once

// Vibrational-level populations of the micro-wells and the resulting
// scattering weights of the two lineshape components. Only the ground and
// first excited vibrational levels are modeled (degeneracies 1 and 2).

namespace latline::population {

// Quadratic map from oscillation frequency (kHz) to atom temperature (uK),
// valid over [nu_min_khz, nu_max_khz].
struct TemperatureModel {
    double a0_uK = 0.0;
    double a1_uK_per_khz = 0.0;
    double a2_uK_per_khz2 = 0.0;
    double nu_min_khz = 0.0;
    double nu_max_khz = 0.0;

    enum class RangePolicy { reject, warn, clamp };
    RangePolicy out_of_range = RangePolicy::reject;

    double evaluate_uK(double nu_osc_khz) const;  // raw quadratic, no range check
};

// Default model: reconstructed so the temperature spans 3-6 uK and the
// population ratio stays near 0.84 across the valid range; the coefficients
// are a calibration, not a measurement.
TemperatureModel default_temperature_model();

// Temperature at nu_osc with range handling per the model policy. Throws
// ConfigError when out of range under RangePolicy::reject.
double temperature_uK(double nu_osc_khz, const TemperatureModel& model);

// Boltzmann population ratio P_E / P_G = 2 exp(-h nu / kB T); the factor 2 is
// the excited-level degeneracy.
double population_ratio(double nu_osc_hz, double temperature_K);

struct PopulationWeights {
    double ratio = 0.0;     // P_E / P_G
    double s_ratio = 3.0;   // S_E / S_G cross-section ratio
    double weight_g = 0.0;  // P_g S_g / (P_g S_g + P_e S_e)
    double weight_e = 0.0;
};

inline constexpr double default_s_ratio = 3.0;  // cross sections scale as n + 1/2

// Normalized two-component weights from the population ratio and the
// cross-section ratio.
PopulationWeights composite_weights(double ratio, double s_ratio = default_s_ratio);

// Convenience: weights at nu_osc along a temperature model.
PopulationWeights weights_at(double nu_osc_hz, const TemperatureModel& model,
                             double s_ratio = default_s_ratio);

}  // namespace latline::population
