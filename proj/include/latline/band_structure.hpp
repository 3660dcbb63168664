#pragma once

// Bloch bands of a 1D sinusoidal lattice V(x) = s * Er * sin^2(kx), solved by
// plane-wave diagonalization over reciprocal vectors 2k*m, |m| <= M. Supplies
// the tunneling bandwidths that enter the Lorentzian component widths.

#include <vector>

#include "latline/constants.hpp"

namespace latline::bands {

struct LatticeDepth {
    double s = 0.0;          // depth in recoil units, V0 = s * Er
    double recoil_hz = recoil_frequency_hz(rb85_mass_kg, rb85_d2_wavelength_m);
};

// How a full band spread (max - min) maps onto the Lorentzian width gamma:
// identified with the HWHM directly (default), or read as a FWHM and halved.
enum class SpreadConvention { hwhm, fwhm };

inline constexpr int default_plane_wave_cutoff = 31;  // 2M+1 with M = 15
inline constexpr int default_quasimomentum_samples = 201;

// Plane-wave count large enough for deep lattices: the momentum spread of the
// low-band states grows as s^(1/4), so the basis must follow it.
int auto_plane_wave_cutoff(double s, int n_max = 2);

// Lowest n_max band energies in Hz at quasimomentum q (units of k, in [-1, 1]),
// ascending. cutoff is the plane-wave count, odd and >= 2*n_max + 5.
std::vector<double> band_energies(double q_over_k, const LatticeDepth& depth, int n_max,
                                  int cutoff = default_plane_wave_cutoff);

struct BlochBand {
    int index = 0;
    std::vector<double> q_over_k;    // quasimomentum grid
    std::vector<double> energy_hz;   // E_n(q)

    double bandwidth_hz() const;     // max - min
};

BlochBand compute_band(int band_index, const LatticeDepth& depth,
                       int q_samples = default_quasimomentum_samples,
                       int cutoff = default_plane_wave_cutoff);

// Full band spread, refined by doubling the quasimomentum grid until the
// change is below 1e-6 relative. cutoff = 0 picks auto_plane_wave_cutoff.
double bandwidth(int band_index, const LatticeDepth& depth, int cutoff = 0);

// Inverse of the harmonic relation nu_osc = 2 sqrt(s) * Er (frequency units).
LatticeDepth depth_from_oscillation(double nu_osc_hz, double recoil_hz);

struct TunnelingLinewidths {
    double gamma_g_hz = 0.0;  // s band
    double gamma_e_hz = 0.0;  // p band
};

// Bandwidths of the lowest two bands at the depth matching nu_osc, expressed
// in the Lorentzian gamma convention.
TunnelingLinewidths tunneling_linewidths(double nu_osc_hz, double recoil_hz,
                                         SpreadConvention convention = SpreadConvention::hwhm);

}  // namespace latline::bands
