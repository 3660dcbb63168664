#pragma once

// Rayleigh-peak lineshape primitives: unit-normalized Lorentzian, Gaussian and
// Voigt densities, the width-composition rules for the two vibrational
// components, the weighted two-component composite, and numeric FWHM
// extraction. All width parameters are in Hz; gamma is an HWHM, sigma a
// standard deviation.

#include <functional>

namespace latline::lineshape {

struct LorentzWidth {
    double gamma_hz = 0.0;  // HWHM
};

struct GaussWidth {
    double sigma_hz = 0.0;  // standard deviation
};

// Widths of one vibrational component: Lorentzian parts add, Gaussian parts
// add in quadrature.
struct ComponentParams {
    double gamma_tun_hz = 0.0;
    double gamma_dep_hz = 0.0;
    double sigma_res_hz = 0.0;
    double sigma_inh_hz = 0.0;

    LorentzWidth gamma() const;
    GaussWidth sigma() const;
};

struct CompositeParams {
    ComponentParams ground;
    ComponentParams excited;
    double weight_g = 1.0;  // population * cross-section weights, sum to 1
    double weight_e = 0.0;
    double center_hz = 0.0;
    double amplitude = 1.0;
    double baseline = 0.0;
};

// (1/pi) gamma / (w^2 + gamma^2); unit-normalized over the real line.
double lorentzian(double omega_hz, const LorentzWidth& width);

// exp(-w^2 / 2 sigma^2) / (sigma sqrt(2 pi)).
double gaussian(double omega_hz, const GaussWidth& width);

// Convolution of the two; sigma = 0 falls back to the pure Lorentzian.
double voigt(double omega_hz, const LorentzWidth& lorentz, const GaussWidth& gauss);

LorentzWidth compose_gamma(double gamma_tun_hz, double gamma_dep_hz);
GaussWidth compose_sigma(double sigma_res_hz, double sigma_inh_hz);

// baseline + amplitude * [w_g Voigt_g(w - center) + w_e Voigt_e(w - center)].
double rayleigh_lineshape(double omega_hz, const CompositeParams& params);

// Full width at half maximum of a symmetric, unimodal, baseline-free peak
// centered at `center`: bisection on f(center + d) = f(center)/2 with
// automatic bracket growth from the initial half-width guess.
double fwhm(const std::function<double(double)>& shape, double center_hz,
            double bracket_hint_hz, double rel_tol = 1e-9);

// FWHM of the composite model (baseline removed internally).
double composite_fwhm(const CompositeParams& params, double rel_tol = 1e-9);

}  // namespace latline::lineshape
