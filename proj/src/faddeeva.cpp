#include "latline/faddeeva.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace latline::lineshape {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double grid_step = 0.25;

// Laplace continued fraction, evaluated backward. Good to ~3e-14 for |z| >= 8,
// but the real part cancels badly when y << x, so callers gate on y as well.
std::complex<double> w_continued_fraction(std::complex<double> z) {
    std::complex<double> r = 0.0;
    for (int k = 30; k >= 1; --k) {
        r = (0.5 * k) / (z - r);
    }
    return std::complex<double>(0.0, 1.0 / std::sqrt(pi)) / (z - r);
}

// Trapezoidal sum over e^{-t^2}/(z-t) plus the residue of the pole at t = z.
// Two interleaved grids keep the sampling nodes away from Re(z); the residue
// term uses (1 -+ e^{-2 pi i z / h}) matching the chosen grid.
std::complex<double> w_trapezoid(std::complex<double> z) {
    const double x = z.real();
    const double y = z.imag();

    const double node_frac = std::abs(x) / grid_step - std::floor(std::abs(x) / grid_step);
    const bool offset_grid = !(node_frac > 0.25 && node_frac < 0.75);

    const int n_max = static_cast<int>(std::ceil((std::abs(x) + 7.0) / grid_step));
    // 1/(z - t) = (dx - i y) / (dx^2 + y^2); both component sums are free of
    // cancellation for y > 0, which keeps Re(w) accurate even at tiny y.
    double sum_re = 0.0;
    double sum_im = 0.0;
    for (int n = -n_max; n <= n_max; ++n) {
        const double t = offset_grid ? (n + 0.5) * grid_step : n * grid_step;
        const double g = std::exp(-t * t);
        const double dx = x - t;
        const double denom = dx * dx + y * y;
        sum_re += g * dx / denom;
        sum_im += g * y / denom;
    }
    std::complex<double> w(grid_step / pi * sum_im, grid_step / pi * sum_re);

    if (y < pi / grid_step) {
        const std::complex<double> q = std::exp(std::complex<double>(0.0, -2.0 * pi / grid_step) * z);
        const std::complex<double> denom = offset_grid ? (1.0 + q) : (1.0 - q);
        w += 2.0 * std::exp(-z * z) / denom;
    }
    return w;
}

}  // namespace

std::complex<double> faddeeva_w(std::complex<double> z) {
    if (z.imag() < 0.0) {
        throw std::invalid_argument("faddeeva_w: requires Im(z) >= 0");
    }
    const double r2 = std::norm(z);
    if (r2 >= 64.0 && z.imag() >= 1e-3 * (1.0 + std::abs(z.real()))) {
        return w_continued_fraction(z);
    }
    return w_trapezoid(z);
}

}  // namespace latline::lineshape
