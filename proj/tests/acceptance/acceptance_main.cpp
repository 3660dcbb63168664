// Acceptance suite: every release criterion in one binary, one PASS/FAIL line
// each, nonzero exit when anything fails. Tolerances and runtime budgets are
// pinned in the checks themselves.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "latline/band_structure.hpp"
#include "latline/constants.hpp"
#include "latline/errors.hpp"
#include "latline/lattice_field.hpp"
#include "latline/lineshape.hpp"
#include "latline/population.hpp"
#include "latline/spectrum_fit.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace latline;
namespace fs = std::filesystem;

namespace {

int failures = 0;

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

struct Criterion {
    std::string name;
    double budget_seconds;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;

    Criterion(std::string n, double budget) : name(std::move(n)), budget_seconds(budget) {}

    void check(bool condition, const std::string& what) {
        if (!condition) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }

    void finish() {
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (budget_seconds > 0.0 && elapsed > budget_seconds) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += "runtime " + std::to_string(elapsed) + " s over budget " +
                      std::to_string(budget_seconds) + " s";
        }
        std::ostringstream line;
        line << (ok ? "[PASS] " : "[FAIL] ") << name << " (" << elapsed << " s";
        if (!detail.empty()) line << "; " << detail;
        line << ")";
        std::cout << line.str() << std::endl;
        if (!ok) ++failures;
    }
};

constexpr double lambda = rb85_d2_wavelength_m;
const double recoil = recoil_frequency_hz(rb85_mass_kg, lambda);

lattice::BeamConfig random_config(oracles::Sampler& s) {
    std::array<double, 6> ph{};
    const double sum = s.uniform(-3.0, 3.0);
    ph[0] = s.uniform(-3.0, 3.0);
    ph[5] = sum - ph[0];
    ph[1] = s.uniform(-3.0, 3.0);
    ph[4] = sum - ph[1];
    ph[2] = s.uniform(-3.0, 3.0);
    ph[3] = sum - ph[2];
    return lattice::BeamConfig{ph, 0.0, 0.0, lambda, 1e-9};
}

// 1. Time-phase factorization of the six-beam sum.
void criterion_factorization() {
    Criterion c("1 field factorization residual < 1e-12 |A|max", 5.0);
    oracles::Sampler s(101);
    const double period = lambda / speed_of_light;
    const double amax = std::sqrt(6.0);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const lattice::BeamConfig cfg = random_config(s);
        std::vector<lattice::Point3> pts(100);
        for (auto& p : pts) {
            p = {s.uniform(-2.0 * lambda, 2.0 * lambda), s.uniform(-2.0 * lambda, 2.0 * lambda),
                 s.uniform(-2.0 * lambda, 2.0 * lambda)};
        }
        std::vector<double> ts(10);
        for (auto& t : ts) t = s.uniform(0.0, 2.0 * period);
        worst = std::max(worst, lattice::verify_factorization(cfg, pts, ts));
    }
    c.detail = "max residual " + sci(worst);
    c.check(worst < 1e-12 * amax, "residual too large");
    c.finish();
}

// 2. Envelope-mode intensity equals the closed form under the X + lambda/4 shift.
void criterion_closed_form() {
    Criterion c("2 closed-form equivalence under the quarter-wave shift", 30.0);
    oracles::Sampler s(102);
    const lattice::BeamConfig cfg = lattice::BeamConfig::from_geometry(0.13 * lambda,
                                                                       0.37 * lambda, lambda);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const lattice::Point3 r{s.uniform(-lambda, lambda), s.uniform(-lambda, lambda),
                                s.uniform(-lambda, lambda)};
        const lattice::Point3 shifted{r.x + 0.25 * lambda, r.y, r.z};
        worst = std::max(worst, std::abs(lattice::intensity(r, cfg) -
                                         lattice::intensity_closed_form(shifted, cfg)));
    }
    c.check(worst < 1e-12, "max abs difference " + sci(worst));

    // 1D scan over candidate shifts: the quarter wave must be the best bin.
    std::vector<lattice::Point3> pts(50);
    for (auto& p : pts) {
        p = {s.uniform(-lambda, lambda), s.uniform(-lambda, lambda),
             s.uniform(-lambda, lambda)};
    }
    auto mismatch = [&](double shift) {
        double m = 0.0;
        for (const auto& r : pts) {
            const lattice::Point3 moved{r.x + shift, r.y, r.z};
            m = std::max(m, std::abs(lattice::intensity(r, cfg) -
                                     lattice::intensity_closed_form(moved, cfg)));
        }
        return m;
    };
    int best = 0;
    double best_val = 1e300;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
        const double v = mismatch(lambda * i / n);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    const double found_shift = lambda * best / n;
    c.detail = "scan minimum at shift/lambda = " + sci(found_shift / lambda);
    c.check(std::abs(found_shift - 0.25 * lambda) <= lambda / n,
            "scan minimum away from lambda/4");
    c.finish();
}

// 3. Voigt against brute-force quadrature, and its FWHM against the empirical
//    combination formula.
void criterion_voigt() {
    Criterion c("3 Voigt quadrature 1e-9 and FWHM combination 0.03%", 30.0);
    oracles::Sampler s(103);
    double worst_rel = 0.0;
    for (int pair = 0; pair < 20; ++pair) {
        const double sigma = s.log_uniform(100.0, 1e4);
        const double gamma = sigma * s.log_uniform(0.1, 10.0);
        const double span = 2.0 * gamma + 2.355 * sigma;
        for (int k = 0; k < 50; ++k) {
            const double w = s.uniform(-5.0, 5.0) * span;
            const double direct = oracles::voigt_by_quadrature(w, gamma, sigma);
            const double fast = lineshape::voigt(w, {gamma}, {sigma});
            worst_rel = std::max(worst_rel, std::abs(fast - direct) / direct);
        }
    }
    c.detail = "max rel quadrature error " + sci(worst_rel);
    c.check(worst_rel < 1e-9, "quadrature disagreement");

    double worst_fwhm = 0.0;
    for (int i = 0; i <= 40; ++i) {
        const double ratio = 0.1 * std::pow(100.0, i / 40.0);  // 0.1 .. 10
        const double sigma = 1000.0;
        const double gamma = ratio * sigma;
        const double width = lineshape::fwhm(
            [&](double w) { return lineshape::voigt(w, {gamma}, {sigma}); }, 0.0,
            gamma + sigma, 1e-10);
        const double fl = 2.0 * gamma;
        const double fg = 2.0 * sigma * std::sqrt(2.0 * std::log(2.0));
        const double approx = 0.5346 * fl + std::sqrt(0.2166 * fl * fl + fg * fg);
        worst_fwhm = std::max(worst_fwhm, std::abs(width - approx) / approx);
    }
    c.detail += ", max FWHM deviation " + sci(worst_fwhm * 100.0) + "%";
    c.check(worst_fwhm < 3e-4, "FWHM combination deviation over 0.03%");
    c.finish();
}

// 4. Population weights at the printed operating point and along the shipped
//    temperature model.
void criterion_weights() {
    Criterion c("4 weights 0.72:0.28 and ratio 0.84 along the model", 5.0);
    const auto w = population::composite_weights(0.84, 3.0);
    c.detail = "weights " + std::to_string(w.weight_e) + ":" + std::to_string(w.weight_g);
    c.check(std::round(w.weight_e * 100.0) == 72.0 && std::round(w.weight_g * 100.0) == 28.0,
            "weights do not round to 0.72:0.28");

    const auto model = population::default_temperature_model();
    double worst = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double nu_khz =
            model.nu_min_khz + (model.nu_max_khz - model.nu_min_khz) * i / 400.0;
        const double t = population::temperature_uK(nu_khz, model);
        c.check(t >= 2.99 && t <= 6.01, "temperature outside 3..6 uK");
        const double r = population::population_ratio(nu_khz * 1e3, t * 1e-6);
        worst = std::max(worst, std::abs(r - 0.84));
    }
    c.detail += ", max |ratio - 0.84| = " + sci(worst);
    c.check(worst <= 0.01, "population ratio drifts past 0.01");
    c.finish();
}

// 5. Band solver limits, harmonic gap, monotone tunneling suppression and
//    cutoff stability.
void criterion_bands() {
    Criterion c("5 band solver free limit, gap, monotonicity, cutoff", 10.0);
    const bands::LatticeDepth flat{0.0, recoil};
    const double bw0 = bands::bandwidth(0, flat);
    c.check(std::abs(bw0 - recoil) / recoil < 1e-9,
            "free-particle bandwidth " + std::to_string(bw0));

    const bands::LatticeDepth s10{10.0, recoil};
    const auto e = bands::band_energies(0.0, s10, 2);
    const double gap = e[1] - e[0];
    const double harmonic = 2.0 * std::sqrt(10.0) * recoil;
    c.detail = "gap/harmonic = " + sci(gap / harmonic);
    c.check(std::abs(gap - harmonic) / harmonic < 0.15, "gap outside 15% of harmonic");

    double prev0 = 1e300, prev1 = 1e300;
    for (int i = 0; i <= 39; ++i) {
        const double s = 1.0 + i;
        const bands::LatticeDepth depth{s, recoil};
        const double b0 = bands::bandwidth(0, depth);
        const double b1 = bands::bandwidth(1, depth);
        c.check(b0 < prev0 && b1 < prev1, "bandwidth not strictly decreasing at s = " +
                                              std::to_string(s));
        prev0 = b0;
        prev1 = b1;
    }

    for (double s : {5.0, 25.0, 50.0}) {
        const bands::LatticeDepth depth{s, recoil};
        for (double q : {0.0, 1.0}) {
            const auto coarse = bands::band_energies(q, depth, 2, 31);
            const auto fine = bands::band_energies(q, depth, 2, 63);
            for (int n = 0; n < 2; ++n) {
                const double scale = std::max(std::abs(fine[n]), recoil);
                c.check(std::abs(coarse[n] - fine[n]) / scale < 1e-9,
                        "cutoff doubling moved a band energy");
            }
        }
    }
    c.finish();
}

// 6. Single-atom protocol round trip at the printed 1.8 kHz widths.
//
// The noisy half of this criterion is information-limited: with both
// inhomogeneous widths free, 101 points spanning +-10 FWHM and 5% noise, the
// Fisher information of the model puts the per-parameter floor near 155 Hz
// (8.6% of 1.8 kHz) even at the best-conditioned operating point and the most
// favorable reading of "5% noise". The 10% box is therefore a ~1.2-sigma
// event per parameter and the 95/100 bar is unreachable. The check below runs
// the protocol as stated under both noise readings and reports the honest
// count rather than loosening the bar.
void criterion_single_fit() {
    Criterion c("6 single-atom fit round trip (noiseless + 100 noisy seeds)", 60.0);

    {
        // Noiseless round trip at the reference widths.
        fixtures::ModelSpec m;  // sigma_inh 1.8 kHz both, nu_osc 20 kHz
        const auto params = fixtures::composite_of(m);
        const auto grid = fixtures::grid_khz(60.0, 101);
        const auto s = specfit::synth_spectrum(params, grid, 0.0, 1);
        specfit::FitConfig cfg = fixtures::single_atom_config(m);
        cfg.initial["sigma_inh_g"] = 1.4 * m.sigma_inh_g_hz;
        cfg.initial["sigma_inh_e"] = 0.6 * m.sigma_inh_e_hz;
        const auto fit = specfit::fit_single_atom(s, cfg);
        const double eg = std::abs(fit.values.at("sigma_inh_g") - m.sigma_inh_g_hz) /
                          m.sigma_inh_g_hz;
        const double ee = std::abs(fit.values.at("sigma_inh_e") - m.sigma_inh_e_hz) /
                          m.sigma_inh_e_hz;
        c.detail = "noiseless rel err " + sci(std::max(eg, ee));
        c.check(fit.converged && eg < 1e-4 && ee < 1e-4, "noiseless recovery off");
    }

    // Noisy Monte-Carlo at the best-conditioned operating point.
    fixtures::ModelSpec m;
    m.nu_osc_khz = 30.0;
    m.gamma_dep_hz = 300.0;
    m.sigma_res_hz = 100.0;
    const auto params = fixtures::composite_of(m);
    const double fw = lineshape::composite_fwhm(params);
    const auto grid = fixtures::grid_khz(10.0 * fw / 1e3, 101);
    const specfit::FitConfig cfg = fixtures::single_atom_config(m);
    const int seeds = 100;

    auto within_box = [&](const specfit::FitResult& fit) {
        return fit.converged &&
               std::abs(fit.values.at("sigma_inh_g") - m.sigma_inh_g_hz) <
                   0.1 * m.sigma_inh_g_hz &&
               std::abs(fit.values.at("sigma_inh_e") - m.sigma_inh_e_hz) <
                   0.1 * m.sigma_inh_e_hz;
    };

    int good_flat = 0;
    const double flat_noise = 0.05 * fixtures::peak_signal(m);
    for (int seed = 0; seed < seeds; ++seed) {
        const auto s = specfit::synth_spectrum(params, grid, flat_noise,
                                               static_cast<std::uint64_t>(9000 + seed));
        if (within_box(specfit::fit_single_atom(s, cfg))) ++good_flat;
    }

    int good_rel = 0;
    for (int seed = 0; seed < seeds; ++seed) {
        const auto s = fixtures::relative_noise_spectrum(params, grid, 0.05,
                                                         static_cast<std::uint64_t>(9000 + seed));
        if (within_box(specfit::fit_single_atom(s, cfg))) ++good_rel;
    }

    c.detail += ", noisy recoveries flat " + std::to_string(good_flat) + "/100, relative " +
                std::to_string(good_rel) + "/100";
    c.check(std::max(good_flat, good_rel) >= 95,
            "fewer than 95 of 100 noisy recoveries (information floor ~155 Hz per width "
            "exceeds the ~55 Hz the bar needs)");
    c.finish();
}

// 7. Joint constant-depletion protocol at the printed parameter values.
void criterion_joint_fit() {
    Criterion c("7 joint fit recovers shared widths within 0.1 kHz", 60.0);
    fixtures::ModelSpec base;
    base.sigma_inh_g_hz = 1700.0;
    base.sigma_inh_e_hz = 2200.0;
    const std::vector<double> nus = {10.0, 14.0, 20.0, 28.0, 40.0, 80.0};
    const auto grid = fixtures::grid_khz(80.0, 121);

    specfit::PhysicsContext ctx;
    ctx.temperature.out_of_range = population::TemperatureModel::RangePolicy::clamp;

    std::vector<specfit::Spectrum> specs;
    for (std::size_t i = 0; i < nus.size(); ++i) {
        fixtures::ModelSpec m = base;
        m.nu_osc_khz = nus[i];
        const auto w = population::weights_at(nus[i] * 1e3, ctx.temperature, ctx.s_ratio);
        m.weight_g = w.weight_g;
        m.weight_e = w.weight_e;
        auto s = specfit::synth_spectrum(fixtures::composite_of(m), grid,
                                         0.005 * fixtures::peak_signal(base),
                                         static_cast<std::uint64_t>(7100 + i));
        s.nu_osc_khz = nus[i];
        specs.push_back(std::move(s));
    }

    const auto joint = specfit::fit_constant_depletion(specs, fixtures::joint_config(base), ctx);
    const double d_dep = std::abs(joint.shared_values.at("gamma_dep") - 1300.0);
    const double d_g = std::abs(joint.shared_values.at("sigma_inh_g") - 1700.0);
    const double d_e = std::abs(joint.shared_values.at("sigma_inh_e") - 2200.0);
    c.detail = "errors Hz: dep " + sci(d_dep) + ", g " + sci(d_g) +
               ", e " + sci(d_e);
    c.check(joint.converged, "joint fit did not converge");
    c.check(d_dep < 100.0 && d_g < 100.0 && d_e < 100.0, "a shared width missed 0.1 kHz");

    auto shuffled = specs;
    std::rotate(shuffled.begin(), shuffled.begin() + 2, shuffled.end());
    std::swap(shuffled[0], shuffled[3]);
    const auto again =
        specfit::fit_constant_depletion(shuffled, fixtures::joint_config(base), ctx);
    for (const auto& name : {"gamma_dep", "sigma_inh_g", "sigma_inh_e"}) {
        const double a = joint.shared_values.at(name);
        const double b = again.shared_values.at(name);
        c.check(std::abs(a - b) / std::abs(a) < 1e-8,
                std::string("permutation moved ") + name);
    }
    c.finish();
}

// 8. FWHM trend: non-increasing and approaching the depletion-only floor.
void criterion_trend() {
    Criterion c("8 FWHM curve non-increasing with the depletion-only asymptote", 10.0);
    specfit::FitConfig cfg;
    cfg.fixed = {{"gamma_dep", 1300.0},
                 {"sigma_res", 1000.0},
                 {"sigma_inh_g", 1800.0},
                 {"sigma_inh_e", 1800.0}};
    specfit::PhysicsContext ctx;
    ctx.temperature.out_of_range = population::TemperatureModel::RangePolicy::clamp;

    std::vector<double> nus;
    for (double nu = 8.0; nu <= 180.0; nu *= 1.12) nus.push_back(nu);
    const auto curve = specfit::fwhm_curve(nus, cfg, ctx);

    for (std::size_t i = 1; i < curve.size(); ++i) {
        c.check(curve[i].fwhm_hz <= curve[i - 1].fwhm_hz * (1.0 + 1e-9),
                "curve increases at nu = " + std::to_string(curve[i].nu_osc_khz));
    }

    lineshape::CompositeParams dep_only;
    dep_only.ground = {0.0, 1300.0, 1000.0, 1800.0};
    dep_only.excited = {0.0, 1300.0, 1000.0, 1800.0};
    const auto w = population::weights_at(nus.back() * 1e3, ctx.temperature, ctx.s_ratio);
    dep_only.weight_g = w.weight_g;
    dep_only.weight_e = w.weight_e;
    const double floor_fwhm = lineshape::composite_fwhm(dep_only, 1e-12);
    const double rel_gap = std::abs(curve.back().fwhm_hz - floor_fwhm) / floor_fwhm;
    c.detail = "drop " + sci(curve.front().fwhm_hz / curve.back().fwhm_hz) +
               "x, asymptote gap " + sci(rel_gap);
    c.check(rel_gap < 1e-6, "asymptote not reached");
    c.check(curve.front().fwhm_hz > 1.2 * curve.back().fwhm_hz, "no visible trend");
    c.finish();
}

// 9. CLI determinism: repeated runs under a fixed seed produce identical bytes.
void criterion_cli_determinism() {
    Criterion c("9 CLI byte-reproducibility under fixed seed", 120.0);
#ifndef LATLINE_CLI_PATH
    c.check(false, "CLI path not configured");
    c.finish();
    return;
#else
    const std::string cli = LATLINE_CLI_PATH;
    const fs::path work = fs::temp_directory_path() / "latline_acceptance";
    std::error_code ec;
    fs::remove_all(work, ec);
    fs::create_directories(work);

    // Shared input files.
    const fs::path params = work / "params.json";
    std::ofstream(params) << R"({
      "gamma_tun_g_khz": 0.8, "gamma_tun_e_khz": 6.0, "gamma_dep_khz": 1.3,
      "sigma_res_khz": 1.0, "sigma_inh_g_khz": 1.8, "sigma_inh_e_khz": 1.8,
      "weight_g": 0.28, "weight_e": 0.72, "amplitude": 1000.0, "baseline": 50.0
    })";
    const fs::path fitcfg = work / "fit.json";
    std::ofstream(fitcfg) << R"({
      "free": ["sigma_inh_g", "sigma_inh_e"],
      "fixed": {"gamma_tun_g": 0.8, "gamma_tun_e": 6.0, "gamma_dep": 1.3,
                 "sigma_res": 1.0, "weight_g": 0.28, "weight_e": 0.72}
    })";
    const fs::path curvecfg = work / "curve.json";
    std::ofstream(curvecfg) << R"({
      "fixed": {"gamma_dep": 1.3, "sigma_res": 1.0, "sigma_inh_g": 1.8, "sigma_inh_e": 1.8}
    })";
    const fs::path beamcfg = work / "beams.json";
    std::ofstream(beamcfg) << R"({"d1_m": 0.0, "d2_m": 0.0})";

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    auto run = [&](const std::string& args) {
        const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };

    // Build one synthetic spectrum used by the fit runs.
    const std::string synth_base = "synth --params " + params.string() +
                                   " --from-khz -60 --to-khz 60 --points 81 --noise 20 --seed 7";
    c.check(run(synth_base + " --out " + (work / "spec.csv").string()) == 0, "synth failed");

    struct Case {
        std::string name;
        std::string args;
        std::string output;
        bool manifest_at_out = true;  // secondary outputs carry no manifest of their own
    };
    const std::vector<Case> cases = {
        {"lattice", "lattice --config " + beamcfg.string() + " --cell 1x1x1 --res 12 "
                    "--depth-khz 100 --wells --out {OUT}", "grid.csv"},
        {"lattice-bin", "lattice --config " + beamcfg.string() + " --cell 1x1x1 --res 10 "
                        "--depth-khz 100 --out " + (work / "scratch_grid.csv").string() +
                        " --binary-out {OUT}", "grid.bin", false},
        {"bands", "bands --s-min 1 --s-max 9 --steps 5 --unit khz --out {OUT}", "bands.csv"},
        {"model", "model --params " + params.string() +
                      " --from-khz -40 --to-khz 40 --points 101 --fwhm --out {OUT}",
         "model.csv"},
        {"synth", synth_base + " --out {OUT}", "spec.csv"},
        {"fit", "fit --spectrum " + (work / "spec.csv").string() + " --config " +
                    fitcfg.string() + " --protocol single-atom --out {OUT}", "fit.json"},
        {"curve", "curve --config " + curvecfg.string() +
                      " --from-khz 8 --to-khz 60 --points 9 --out {OUT}", "curve.csv"},
    };

    for (const auto& test : cases) {
        const fs::path out_a = work / ("a_" + test.output);
        const fs::path out_b = work / ("b_" + test.output);
        std::string cmd_a = test.args;
        std::string cmd_b = test.args;
        cmd_a.replace(cmd_a.find("{OUT}"), 5, out_a.string());
        cmd_b.replace(cmd_b.find("{OUT}"), 5, out_b.string());
        const bool ok_a = run(cmd_a) == 0;
        const bool ok_b = run(cmd_b) == 0;
        c.check(ok_a && ok_b, test.name + " run failed");
        if (ok_a && ok_b) {
            const std::string bytes_a = slurp(out_a);
            c.check(!bytes_a.empty() && bytes_a == slurp(out_b),
                    test.name + " output not byte-identical");
            // Every run must leave a manifest naming its outputs.
            if (test.manifest_at_out) {
                const std::string manifest =
                    slurp(fs::path(out_a.string() + ".manifest.json"));
                c.check(manifest.find("\"outputs\"") != std::string::npos &&
                            manifest.find("fnv1a64:") != std::string::npos,
                        test.name + " manifest missing or incomplete");
            }
        }
    }

    // weights prints to stdout; capture through the shell.
    const std::string wa = (work / "wa.txt").string();
    const std::string wb = (work / "wb.txt").string();
    c.check(std::system((cli + " weights --nu-khz 60 > " + wa + " 2>/dev/null").c_str()) == 0,
            "weights run failed");
    c.check(std::system((cli + " weights --nu-khz 60 > " + wb + " 2>/dev/null").c_str()) == 0,
            "weights rerun failed");
    c.check(slurp(wa) == slurp(wb) && !slurp(wa).empty(), "weights output not identical");

    // Error categories: unknown subcommand, malformed data, bad config.
    c.check(std::system((cli + " bogus > /dev/null 2>&1").c_str()) != 0,
            "unknown subcommand not rejected");
    const fs::path bad_csv = work / "bad.csv";
    std::ofstream(bad_csv) << "detuning_khz,counts\n1,2\n1,3\n";
    const int fit_code = std::system((cli + " fit --spectrum " + bad_csv.string() +
                                      " --config " + fitcfg.string() + " --out " +
                                      (work / "never.json").string() + " > /dev/null 2>&1")
                                         .c_str());
    c.check(WIFEXITED(fit_code) && WEXITSTATUS(fit_code) == 3, "malformed CSV exit code != 3");
    const int cfg_code = std::system((cli + " fit --spectrum " + (work / "spec.csv").string() +
                                      " --config " + (work / "missing.json").string() +
                                      " --out " + (work / "never.json").string() +
                                      " > /dev/null 2>&1")
                                         .c_str());
    c.check(WIFEXITED(cfg_code) && WEXITSTATUS(cfg_code) == 2, "missing config exit code != 2");
    c.finish();
#endif
}

}  // namespace

int main() {
    std::cout << "latline acceptance suite\n";
    criterion_factorization();
    criterion_closed_form();
    criterion_voigt();
    criterion_weights();
    criterion_bands();
    criterion_single_fit();
    criterion_joint_fit();
    criterion_trend();
    criterion_cli_determinism();
    if (failures) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
