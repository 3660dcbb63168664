#include "latline/lineshape.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "latline/errors.hpp"
#include "latline/faddeeva.hpp"

namespace latline::lineshape {

namespace {
constexpr double pi = std::numbers::pi;
const double sqrt2 = std::sqrt(2.0);
const double sqrt_2pi = std::sqrt(2.0 * pi);
}  // namespace

LorentzWidth ComponentParams::gamma() const {
    return compose_gamma(gamma_tun_hz, gamma_dep_hz);
}

GaussWidth ComponentParams::sigma() const {
    return compose_sigma(sigma_res_hz, sigma_inh_hz);
}

double lorentzian(double omega_hz, const LorentzWidth& width) {
    if (!(width.gamma_hz > 0.0)) {
        throw std::invalid_argument("lorentzian: gamma must be positive");
    }
    const double g = width.gamma_hz;
    return g / (pi * (omega_hz * omega_hz + g * g));
}

double gaussian(double omega_hz, const GaussWidth& width) {
    if (!(width.sigma_hz > 0.0)) {
        throw std::invalid_argument("gaussian: sigma must be positive");
    }
    const double s = width.sigma_hz;
    const double u = omega_hz / s;
    return std::exp(-0.5 * u * u) / (s * sqrt_2pi);
}

double voigt(double omega_hz, const LorentzWidth& lorentz, const GaussWidth& gauss) {
    if (!(lorentz.gamma_hz > 0.0)) {
        throw std::invalid_argument("voigt: gamma must be positive");
    }
    if (gauss.sigma_hz < 0.0) {
        throw std::invalid_argument("voigt: sigma must be non-negative");
    }
    if (gauss.sigma_hz == 0.0) {
        return lorentzian(omega_hz, lorentz);
    }
    const double denom = gauss.sigma_hz * sqrt2;
    const std::complex<double> z(omega_hz / denom, lorentz.gamma_hz / denom);
    return faddeeva_w(z).real() / (gauss.sigma_hz * sqrt_2pi);
}

LorentzWidth compose_gamma(double gamma_tun_hz, double gamma_dep_hz) {
    if (gamma_tun_hz < 0.0 || gamma_dep_hz < 0.0) {
        throw std::invalid_argument("compose_gamma: contributions must be non-negative");
    }
    const double sum = gamma_tun_hz + gamma_dep_hz;
    if (!(sum > 0.0)) {
        throw std::invalid_argument("compose_gamma: total Lorentzian width must be positive");
    }
    return {sum};
}

GaussWidth compose_sigma(double sigma_res_hz, double sigma_inh_hz) {
    if (sigma_res_hz < 0.0 || sigma_inh_hz < 0.0) {
        throw std::invalid_argument("compose_sigma: contributions must be non-negative");
    }
    return {std::hypot(sigma_res_hz, sigma_inh_hz)};
}

double rayleigh_lineshape(double omega_hz, const CompositeParams& params) {
    if (params.weight_g < 0.0 || params.weight_e < 0.0) {
        throw std::invalid_argument("rayleigh_lineshape: weights must be non-negative");
    }
    const double d = omega_hz - params.center_hz;
    double value = 0.0;
    if (params.weight_g > 0.0) {
        value += params.weight_g * voigt(d, params.ground.gamma(), params.ground.sigma());
    }
    if (params.weight_e > 0.0) {
        value += params.weight_e * voigt(d, params.excited.gamma(), params.excited.sigma());
    }
    return params.baseline + params.amplitude * value;
}

double fwhm(const std::function<double(double)>& shape, double center_hz,
            double bracket_hint_hz, double rel_tol) {
    if (!(bracket_hint_hz > 0.0)) {
        throw std::invalid_argument("fwhm: bracket hint must be positive");
    }
    const double peak = shape(center_hz);
    if (!(peak > 0.0) || !std::isfinite(peak)) {
        throw NumericError("fwhm: peak value must be positive and finite");
    }
    const double half = 0.5 * peak;

    // Grow the bracket until the half level is crossed.
    double hi = bracket_hint_hz;
    int growth = 0;
    while (shape(center_hz + hi) > half) {
        hi *= 2.0;
        if (++growth > 200) {
            throw NumericError("fwhm: no half-maximum crossing found; bracket exhausted");
        }
    }
    double lo = (growth == 0) ? 0.0 : hi * 0.5;

    while ((hi - lo) > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (shape(center_hz + mid) > half) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo + hi;  // 2 * midpoint
}

double composite_fwhm(const CompositeParams& params, double rel_tol) {
    CompositeParams p = params;
    p.baseline = 0.0;
    p.amplitude = 1.0;
    const double hint =
        2.0 * (p.ground.gamma().gamma_hz + p.excited.gamma().gamma_hz +
               p.ground.sigma().sigma_hz + p.excited.sigma().sigma_hz);
    return fwhm([&p](double w) { return rayleigh_lineshape(w, p); }, p.center_hz, hint, rel_tol);
}

}  // namespace latline::lineshape
