#include <doctest.h>

#include <cmath>
#include <numbers>

#include "latline/errors.hpp"
#include "latline/lineshape.hpp"
#include "support/oracles.hpp"

using namespace latline::lineshape;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("lorentzian") {
    const LorentzWidth g{1250.0};
    CHECK(lorentzian(0.0, g) == doctest::Approx(1.0 / (pi * g.gamma_hz)));
    CHECK(lorentzian(g.gamma_hz, g) == doctest::Approx(1.0 / (2.0 * pi * g.gamma_hz)));
    CHECK_THROWS_AS(lorentzian(0.0, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(lorentzian(0.0, {-2.0}), std::invalid_argument);

    SUBCASE("normalized over a wide window") {
        auto f = [&](double w) { return lorentzian(w, g); };
        const double lim = 1e4 * g.gamma_hz;
        double integral = 0.0;
        // log-spaced panels to capture the slow tails
        double a = 0.0;
        for (double b : {g.gamma_hz, 10 * g.gamma_hz, 100 * g.gamma_hz, 1e3 * g.gamma_hz, lim}) {
            integral += oracles::adaptive_simpson(f, a, b, 1e-12);
            a = b;
        }
        integral *= 2.0;  // even function
        CHECK(integral == doctest::Approx(1.0).epsilon(1e-4));
    }
}

TEST_CASE("gaussian") {
    const GaussWidth s{1800.0};
    CHECK(gaussian(0.0, s) == doctest::Approx(1.0 / (s.sigma_hz * std::sqrt(2.0 * pi))));
    CHECK_THROWS_AS(gaussian(0.0, {0.0}), std::invalid_argument);

    SUBCASE("half maximum sits at sigma*sqrt(2 ln 2)") {
        const double hwhm = s.sigma_hz * std::sqrt(2.0 * std::log(2.0));
        CHECK(gaussian(hwhm, s) == doctest::Approx(0.5 * gaussian(0.0, s)).epsilon(1e-12));
    }
    SUBCASE("unit normalization") {
        auto f = [&](double w) { return gaussian(w, s); };
        const double integral =
            2.0 * oracles::adaptive_simpson(f, 0.0, 12.0 * s.sigma_hz, 1e-15);
        CHECK(integral == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("voigt") {
    SUBCASE("sigma = 0 falls back to the Lorentzian exactly") {
        const LorentzWidth g{730.0};
        for (double w : {0.0, 100.0, 5e3, -2e4}) {
            CHECK(voigt(w, g, {0.0}) == lorentzian(w, g));
        }
    }
    SUBCASE("peak is bounded by both component peaks") {
        oracles::Sampler rng(17);
        for (int i = 0; i < 40; ++i) {
            const double gamma = rng.log_uniform(10.0, 1e5);
            const double sigma = rng.log_uniform(10.0, 1e5);
            const double peak = voigt(0.0, {gamma}, {sigma});
            CHECK(peak <= 1.0 / (pi * gamma) + 1e-15);
            CHECK(peak <= 1.0 / (sigma * std::sqrt(2.0 * pi)) + 1e-15);
            CHECK(peak > 0.0);
        }
    }
    SUBCASE("agrees with direct quadrature of the convolution to 1e-9") {
        oracles::Sampler rng(23);
        for (int pair = 0; pair < 20; ++pair) {
            const double sigma = rng.log_uniform(100.0, 1e4);
            const double gamma = sigma * rng.log_uniform(0.1, 10.0);
            const double fwhm_guess = 2.0 * gamma + 2.355 * sigma;
            for (int k = 0; k < 8; ++k) {
                const double w = rng.uniform(-5.0, 5.0) * fwhm_guess;
                const double direct = oracles::voigt_by_quadrature(w, gamma, sigma);
                const double fast = voigt(w, {gamma}, {sigma});
                CHECK(std::abs(fast - direct) / direct < 1e-9);
            }
        }
    }
    SUBCASE("vanishing sigma approaches the Lorentzian at the peak") {
        const double gamma = 2000.0;
        const double sigma = 1e-6 * gamma;
        const double rel =
            std::abs(voigt(0.0, {gamma}, {sigma}) - lorentzian(0.0, {gamma})) /
            lorentzian(0.0, {gamma});
        CHECK(rel < 1e-4);
    }
    SUBCASE("numeric normalization") {
        const double gamma = 900.0, sigma = 1500.0;
        auto f = [&](double w) { return voigt(w, {gamma}, {sigma}); };
        double integral = 0.0;
        double a = 0.0;
        for (double b : {5e3, 5e4, 5e5, 5e6, 5e7, 5e8, 5e9}) {
            integral += oracles::adaptive_simpson(f, a, b, 1e-13);
            a = b;
        }
        integral *= 2.0;
        CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("invalid widths") {
        CHECK_THROWS_AS(voigt(0.0, {0.0}, {1.0}), std::invalid_argument);
        CHECK_THROWS_AS(voigt(0.0, {1.0}, {-1.0}), std::invalid_argument);
    }
}

TEST_CASE("width composition") {
    CHECK(compose_gamma(0.0, 1300.0).gamma_hz == doctest::Approx(1300.0));
    CHECK(compose_gamma(1000.0, 1300.0).gamma_hz == doctest::Approx(2300.0));
    CHECK(compose_gamma(700.0, 400.0).gamma_hz ==
          doctest::Approx(compose_gamma(400.0, 700.0).gamma_hz));
    CHECK_THROWS_AS(compose_gamma(0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(compose_gamma(-1.0, 5.0), std::invalid_argument);

    CHECK(compose_sigma(1234.0, 0.0).sigma_hz == doctest::Approx(1234.0));
    CHECK(compose_sigma(3.0, 4.0).sigma_hz == doctest::Approx(5.0));
    CHECK(compose_sigma(500.0, 1800.0).sigma_hz ==
          doctest::Approx(std::sqrt(500.0 * 500.0 + 1800.0 * 1800.0)));
    CHECK_THROWS_AS(compose_sigma(-1.0, 1.0), std::invalid_argument);
}

namespace {

CompositeParams sample_params() {
    CompositeParams p;
    p.ground = {800.0, 1300.0, 500.0, 1800.0};
    p.excited = {5000.0, 1300.0, 500.0, 1800.0};
    p.weight_g = 0.28;
    p.weight_e = 0.72;
    p.center_hz = 2500.0;
    p.amplitude = 120.0;
    p.baseline = 6.0;
    return p;
}

}  // namespace

TEST_CASE("composite lineshape") {
    SUBCASE("single-component limit") {
        CompositeParams p = sample_params();
        p.weight_g = 1.0;
        p.weight_e = 0.0;
        const double w = p.center_hz + 1234.0;
        const double expected =
            p.baseline + p.amplitude * voigt(1234.0, p.ground.gamma(), p.ground.sigma());
        CHECK(rayleigh_lineshape(w, p) == doctest::Approx(expected).epsilon(1e-14));
    }
    SUBCASE("equal component widths collapse to a single Voigt") {
        CompositeParams p = sample_params();
        p.excited = p.ground;
        const double w = p.center_hz - 3456.0;
        const double expected =
            p.baseline + p.amplitude * voigt(-3456.0, p.ground.gamma(), p.ground.sigma());
        CHECK(rayleigh_lineshape(w, p) == doctest::Approx(expected).epsilon(1e-13));
    }
    SUBCASE("even about the center") {
        const CompositeParams p = sample_params();
        oracles::Sampler rng(5);
        for (int i = 0; i < 50; ++i) {
            const double d = rng.uniform(0.0, 5e4);
            const double hi = rayleigh_lineshape(p.center_hz + d, p);
            const double lo = rayleigh_lineshape(p.center_hz - d, p);
            CHECK(hi == doctest::Approx(lo).epsilon(1e-12));
        }
    }
}

TEST_CASE("fwhm extraction") {
    SUBCASE("pure Lorentzian gives 2 gamma") {
        const LorentzWidth g{1750.0};
        const double width =
            fwhm([&](double w) { return lorentzian(w, g); }, 0.0, 100.0, 1e-7);
        CHECK(width == doctest::Approx(2.0 * g.gamma_hz).epsilon(1e-6));
    }
    SUBCASE("pure Gaussian gives 2 sigma sqrt(2 ln 2)") {
        const GaussWidth s{964.0};
        const double width =
            fwhm([&](double w) { return gaussian(w, s); }, 0.0, 5.0 * s.sigma_hz, 1e-7);
        CHECK(width ==
              doctest::Approx(2.0 * s.sigma_hz * std::sqrt(2.0 * std::log(2.0))).epsilon(1e-6));
    }
    SUBCASE("voigt FWHM matches the empirical combination to 0.03%") {
        oracles::Sampler rng(29);
        for (int i = 0; i < 30; ++i) {
            const double sigma = rng.log_uniform(200.0, 5000.0);
            const double gamma = sigma * rng.log_uniform(0.1, 10.0);
            const double width = fwhm([&](double w) { return voigt(w, {gamma}, {sigma}); }, 0.0,
                                      gamma + sigma, 1e-10);
            const double fl = 2.0 * gamma;
            const double fg = 2.0 * sigma * std::sqrt(2.0 * std::log(2.0));
            const double approx = 0.5346 * fl + std::sqrt(0.2166 * fl * fl + fg * fg);
            CHECK(std::abs(width - approx) / approx < 3e-4);
        }
    }
    SUBCASE("composite FWHM sits between the component FWHMs") {
        oracles::Sampler rng(31);
        for (int i = 0; i < 20; ++i) {
            CompositeParams p = sample_params();
            p.ground.sigma_inh_hz = rng.uniform(500.0, 3000.0);
            p.excited.sigma_inh_hz = rng.uniform(500.0, 3000.0);
            p.excited.gamma_tun_hz = rng.uniform(0.0, 8000.0);
            p.weight_e = rng.uniform(0.2, 0.8);
            p.weight_g = 1.0 - p.weight_e;
            const double total = composite_fwhm(p);
            const double fg =
                fwhm([&](double w) { return voigt(w, p.ground.gamma(), p.ground.sigma()); }, 0.0,
                     1e3, 1e-9);
            const double fe =
                fwhm([&](double w) { return voigt(w, p.excited.gamma(), p.excited.sigma()); },
                     0.0, 1e3, 1e-9);
            CHECK(total >= std::min(fg, fe) * (1.0 - 1e-9));
            CHECK(total <= std::max(fg, fe) * (1.0 + 1e-9));
        }
    }
    SUBCASE("monotone broadening in gamma and sigma") {
        double prev = 0.0;
        for (double gamma : {500.0, 900.0, 1500.0, 2600.0}) {
            const double width =
                fwhm([&](double w) { return voigt(w, {gamma}, {1000.0}); }, 0.0, 1e3, 1e-9);
            CHECK(width > prev);
            prev = width;
        }
        prev = 0.0;
        for (double sigma : {400.0, 800.0, 1500.0, 2800.0}) {
            const double width =
                fwhm([&](double w) { return voigt(w, {1000.0}, {sigma}); }, 0.0, 1e3, 1e-9);
            CHECK(width > prev);
            prev = width;
        }
    }
    SUBCASE("missing crossing is reported") {
        CHECK_THROWS_AS(fwhm([](double) { return 1.0; }, 0.0, 1.0, 1e-6),
                        latline::NumericError);
    }
}
