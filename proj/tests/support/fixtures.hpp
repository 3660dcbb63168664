#pragma once

// Shared synthetic-spectrum setups for the fitting tests: the standard
// two-component model at a given oscillation frequency with tunneling widths
// taken from the band solver and the standard 0.28/0.72 component weights.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "latline/band_structure.hpp"
#include "latline/lineshape.hpp"
#include "latline/spectrum_fit.hpp"

namespace fixtures {

inline const double recoil_hz =
    latline::recoil_frequency_hz(latline::rb85_mass_kg, latline::rb85_d2_wavelength_m);

struct ModelSpec {
    double nu_osc_khz = 20.0;
    double gamma_dep_hz = 1300.0;
    double sigma_res_hz = 1000.0;
    double sigma_inh_g_hz = 1800.0;
    double sigma_inh_e_hz = 1800.0;
    double weight_g = 0.28;
    double weight_e = 0.72;
    // The amplitude multiplies unit-normalized densities, so photon-count
    // peak heights need a scale of order peak_counts / voigt_peak_density.
    double amplitude = 2.0e7;
    double center_hz = 0.0;
    double baseline = 50.0;
};

inline latline::lineshape::CompositeParams composite_of(const ModelSpec& m) {
    const auto widths = latline::bands::tunneling_linewidths(m.nu_osc_khz * 1e3, recoil_hz);
    latline::lineshape::CompositeParams p;
    p.ground.gamma_tun_hz = widths.gamma_g_hz;
    p.ground.gamma_dep_hz = m.gamma_dep_hz;
    p.ground.sigma_res_hz = m.sigma_res_hz;
    p.ground.sigma_inh_hz = m.sigma_inh_g_hz;
    p.excited.gamma_tun_hz = widths.gamma_e_hz;
    p.excited.gamma_dep_hz = m.gamma_dep_hz;
    p.excited.sigma_res_hz = m.sigma_res_hz;
    p.excited.sigma_inh_hz = m.sigma_inh_e_hz;
    p.weight_g = m.weight_g;
    p.weight_e = m.weight_e;
    p.amplitude = m.amplitude;
    p.center_hz = m.center_hz;
    p.baseline = m.baseline;
    return p;
}

// Signal height above baseline at the line center, in counts.
inline double peak_signal(const ModelSpec& m) {
    const auto p = composite_of(m);
    return latline::lineshape::rayleigh_lineshape(p.center_hz, p) - p.baseline;
}

// Spectrum with per-point Gaussian noise of `frac` relative to the model
// value, carrying the matching uncertainty column. Deterministic per seed.
inline latline::specfit::Spectrum relative_noise_spectrum(
    const latline::lineshape::CompositeParams& params, const std::vector<double>& grid_khz,
    double frac, std::uint64_t seed) {
    latline::specfit::Spectrum s;
    s.detuning_khz = grid_khz;
    std::mt19937_64 rng(seed);
    auto uniform = [&rng] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
    for (double x : grid_khz) {
        const double value = latline::lineshape::rayleigh_lineshape(x * 1e3, params);
        const double sigma = frac * value;
        const double noise =
            sigma * std::sqrt(-2.0 * std::log(uniform())) *
            std::cos(2.0 * 3.14159265358979323846 * uniform());
        s.counts.push_back(value + noise);
        s.sigma.push_back(sigma);
    }
    return s;
}

inline std::vector<double> grid_khz(double half_span_khz, int points) {
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        g.push_back(-half_span_khz + 2.0 * half_span_khz * i / (points - 1));
    }
    return g;
}

// FitConfig for the per-spectrum protocol: both inhomogeneous widths free,
// everything else pinned to the generator values.
inline latline::specfit::FitConfig single_atom_config(const ModelSpec& m) {
    const auto widths = latline::bands::tunneling_linewidths(m.nu_osc_khz * 1e3, recoil_hz);
    latline::specfit::FitConfig cfg;
    cfg.free = {"sigma_inh_g", "sigma_inh_e"};
    cfg.fixed = {{"gamma_tun_g", widths.gamma_g_hz}, {"gamma_tun_e", widths.gamma_e_hz},
                 {"gamma_dep", m.gamma_dep_hz},      {"sigma_res", m.sigma_res_hz},
                 {"weight_g", m.weight_g},           {"weight_e", m.weight_e}};
    return cfg;
}

// FitConfig for the joint protocol: depletion width shared and free; the
// tunneling widths and weights are filled per spectrum from the physics
// context.
inline latline::specfit::FitConfig joint_config(const ModelSpec& m) {
    latline::specfit::FitConfig cfg;
    cfg.protocol = latline::specfit::Protocol::constant_depletion;
    cfg.free = {"gamma_dep", "sigma_inh_g", "sigma_inh_e"};
    cfg.fixed = {{"gamma_tun_g", 0.0},  // overwritten per spectrum by apply_physics
                 {"gamma_tun_e", 0.0},
                 {"sigma_res", m.sigma_res_hz}};
    return cfg;
}

}  // namespace fixtures
