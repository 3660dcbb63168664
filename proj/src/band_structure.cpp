#include "latline/band_structure.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "latline/errors.hpp"

namespace latline::bands {

int auto_plane_wave_cutoff(double s, int n_max) {
    const int m_depth = static_cast<int>(std::ceil(2.6 * std::pow(std::max(s, 0.0), 0.25))) + 6;
    const int m = std::max({15, m_depth, n_max + 3});
    return 2 * m + 1;
}

std::vector<double> band_energies(double q_over_k, const LatticeDepth& depth, int n_max,
                                  int cutoff) {
    if (n_max < 1) throw std::invalid_argument("band_energies: n_max must be >= 1");
    if (cutoff % 2 == 0 || cutoff < 2 * n_max + 5) {
        throw std::invalid_argument("band_energies: cutoff must be odd and >= 2*n_max + 5");
    }
    if (std::abs(q_over_k) > 1.0 + 1e-12) {
        throw std::invalid_argument("band_energies: |q| must not exceed k");
    }
    if (depth.s < 0.0 || !(depth.recoil_hz > 0.0)) {
        throw std::invalid_argument("band_energies: invalid lattice depth");
    }

    const int m_max = (cutoff - 1) / 2;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(cutoff, cutoff);
    // In recoil units: diagonal (q/k + 2m)^2 + s/2, first off-diagonals -s/4
    // from sin^2(kx) = 1/2 - (e^{2ikx} + e^{-2ikx})/4.
    for (int i = 0; i < cutoff; ++i) {
        const double m = static_cast<double>(i - m_max);
        const double pw = q_over_k + 2.0 * m;
        h(i, i) = pw * pw + 0.5 * depth.s;
        if (i + 1 < cutoff) {
            h(i, i + 1) = -0.25 * depth.s;
            h(i + 1, i) = -0.25 * depth.s;
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success) {
        throw NumericError("band_energies: eigen-solver failed to converge");
    }

    std::vector<double> energies(static_cast<std::size_t>(n_max));
    for (int n = 0; n < n_max; ++n) {
        energies[static_cast<std::size_t>(n)] = solver.eigenvalues()[n] * depth.recoil_hz;
    }
    return energies;
}

double BlochBand::bandwidth_hz() const {
    const auto [lo, hi] = std::minmax_element(energy_hz.begin(), energy_hz.end());
    return *hi - *lo;
}

BlochBand compute_band(int band_index, const LatticeDepth& depth, int q_samples, int cutoff) {
    if (band_index < 0) throw std::invalid_argument("compute_band: band index must be >= 0");
    if (q_samples < 3) throw std::invalid_argument("compute_band: need at least 3 q samples");

    BlochBand band;
    band.index = band_index;
    band.q_over_k.reserve(static_cast<std::size_t>(q_samples));
    band.energy_hz.reserve(static_cast<std::size_t>(q_samples));
    for (int i = 0; i < q_samples; ++i) {
        const double q = -1.0 + 2.0 * i / (q_samples - 1);
        band.q_over_k.push_back(q);
        band.energy_hz.push_back(
            band_energies(q, depth, band_index + 1, cutoff)[static_cast<std::size_t>(band_index)]);
    }
    return band;
}

double bandwidth(int band_index, const LatticeDepth& depth, int cutoff) {
    if (cutoff == 0) cutoff = auto_plane_wave_cutoff(depth.s, band_index + 1);
    int samples = default_quasimomentum_samples;
    double previous = compute_band(band_index, depth, samples, cutoff).bandwidth_hz();
    for (int round = 0; round < 4; ++round) {
        samples = 2 * samples - 1;  // doubling keeps the band-edge points
        const double refined = compute_band(band_index, depth, samples, cutoff).bandwidth_hz();
        const double scale = std::max(std::abs(refined), 1e-300);
        if (std::abs(refined - previous) / scale < 1e-6) return refined;
        previous = refined;
    }
    return previous;
}

LatticeDepth depth_from_oscillation(double nu_osc_hz, double recoil_hz) {
    if (!(nu_osc_hz > 0.0)) {
        throw std::invalid_argument("depth_from_oscillation: nu_osc must be positive");
    }
    if (!(recoil_hz > 0.0)) {
        throw std::invalid_argument("depth_from_oscillation: recoil frequency must be positive");
    }
    const double ratio = nu_osc_hz / (2.0 * recoil_hz);
    return {ratio * ratio, recoil_hz};
}

TunnelingLinewidths tunneling_linewidths(double nu_osc_hz, double recoil_hz,
                                         SpreadConvention convention) {
    const LatticeDepth depth = depth_from_oscillation(nu_osc_hz, recoil_hz);
    const double factor = (convention == SpreadConvention::hwhm) ? 1.0 : 0.5;
    return {factor * bandwidth(0, depth), factor * bandwidth(1, depth)};
}

}  // namespace latline::bands
