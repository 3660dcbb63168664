#include "latline/spectrum_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "latline/errors.hpp"
#include "latline/least_squares.hpp"

namespace latline::specfit {

namespace {

constexpr double khz = 1000.0;

const std::vector<std::string> kPhysicsNames = {
    "gamma_tun_g", "gamma_tun_e", "gamma_dep",  "sigma_res",
    "sigma_inh_g", "sigma_inh_e", "weight_g",   "weight_e"};

const std::vector<std::string> kNuisanceNames = {"amplitude", "center", "baseline"};

lineshape::CompositeParams composite_from_map(const std::map<std::string, double>& p) {
    lineshape::CompositeParams c;
    c.ground.gamma_tun_hz = p.at("gamma_tun_g");
    c.ground.gamma_dep_hz = p.at("gamma_dep");
    c.ground.sigma_res_hz = p.at("sigma_res");
    c.ground.sigma_inh_hz = p.at("sigma_inh_g");
    c.excited.gamma_tun_hz = p.at("gamma_tun_e");
    c.excited.gamma_dep_hz = p.at("gamma_dep");
    c.excited.sigma_res_hz = p.at("sigma_res");
    c.excited.sigma_inh_hz = p.at("sigma_inh_e");
    c.weight_g = p.at("weight_g");
    c.weight_e = p.at("weight_e");
    c.amplitude = p.at("amplitude");
    c.center_hz = p.at("center");
    c.baseline = p.at("baseline");
    return c;
}

struct InitialEstimates {
    double baseline = 0.0;
    double amplitude = 0.0;
    double center_hz = 0.0;
    double width_hz = 0.0;  // moment-based spread of the baseline-subtracted peak
};

InitialEstimates estimate_from_data(const Spectrum& spec) {
    const std::size_t n = spec.size();
    const std::size_t edge = std::max<std::size_t>(1, n / 10);
    std::vector<double> edges;
    for (std::size_t i = 0; i < edge; ++i) {
        edges.push_back(spec.counts[i]);
        edges.push_back(spec.counts[n - 1 - i]);
    }
    std::sort(edges.begin(), edges.end());
    InitialEstimates est;
    est.baseline = edges[edges.size() / 2];

    std::size_t peak_idx = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (spec.counts[i] > spec.counts[peak_idx]) peak_idx = i;
    }
    est.center_hz = spec.detuning_khz[peak_idx] * khz;
    est.amplitude = std::max(spec.counts[peak_idx] - est.baseline, 0.0);

    double norm = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = std::max(spec.counts[i] - est.baseline, 0.0);
        const double d = spec.detuning_khz[i] * khz - est.center_hz;
        norm += w;
        m2 += w * d * d;
    }
    const double span = (spec.detuning_khz.back() - spec.detuning_khz.front()) * khz;
    est.width_hz = (norm > 0.0) ? std::sqrt(m2 / norm) : 0.1 * span;
    est.width_hz = std::max(est.width_hz, 1e-6 * span);
    return est;
}

struct BoundSpec {
    double lo, hi, init, scale;
};

// Default bounds, initial value and scale for one free parameter. The
// amplitude multiplies a unit-normalized density, so its natural scale is the
// data peak height divided by the model peak density at the initial widths;
// that density is supplied by the caller once the width guesses are resolved.
BoundSpec default_bound(const std::string& name, const InitialEstimates& est,
                        const Spectrum& spec, double peak_density) {
    const double grid_lo = spec.detuning_khz.front() * khz;
    const double grid_hi = spec.detuning_khz.back() * khz;
    const double span = grid_hi - grid_lo;
    const double amp_scale = std::max(est.amplitude, 1.0) / peak_density;
    const double count_scale = std::max({std::abs(est.amplitude), std::abs(est.baseline), 1.0});
    if (name == "sigma_inh_g" || name == "sigma_inh_e") {
        return {0.0, 100.0 * span, std::max(0.5 * est.width_hz, 1e-3 * span), 0.01 * span};
    }
    if (name == "gamma_dep" || name == "gamma_tun_g" || name == "gamma_tun_e") {
        return {1e-6 * span, 100.0 * span, std::max(0.25 * est.width_hz, 1e-3 * span),
                0.01 * span};
    }
    if (name == "sigma_res") {
        return {0.0, 100.0 * span, std::max(0.25 * est.width_hz, 1e-3 * span), 0.01 * span};
    }
    if (name == "weight_g" || name == "weight_e") {
        return {0.0, 1.0, 0.5, 0.1};
    }
    if (name == "amplitude") {
        return {0.0, 1e12 * amp_scale, est.amplitude / peak_density, amp_scale};
    }
    if (name == "center") {
        return {grid_lo, grid_hi, est.center_hz, 0.01 * span};
    }
    if (name == "baseline") {
        return {-1e12 * count_scale, 1e12 * count_scale, est.baseline, count_scale};
    }
    throw ConfigError("unknown model parameter '" + name + "'");
}

// Peak density of the unit-amplitude composite for the given parameter values
// (fixed values plus initial width guesses).
double initial_peak_density(const std::map<std::string, double>& params) {
    auto p = params;
    p["amplitude"] = 1.0;
    p["baseline"] = 0.0;
    p["center"] = 0.0;
    try {
        return std::max(lineshape::rayleigh_lineshape(0.0, composite_from_map(p)), 1e-300);
    } catch (const std::exception&) {
        return 1e-300;
    }
}

std::vector<double> weights_for(const Spectrum& spec, bool unweighted) {
    std::vector<double> sig = effective_sigma(spec);
    if (unweighted) {
        std::fill(sig.begin(), sig.end(), 1.0);
    }
    return sig;
}

double propagate_fwhm_uncertainty(const std::map<std::string, double>& values,
                                  const std::vector<std::string>& free_names,
                                  const Eigen::MatrixXd& covariance, double fwhm0) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(free_names.size()));
    for (std::size_t j = 0; j < free_names.size(); ++j) {
        const std::string& name = free_names[j];
        if (name == "amplitude" || name == "baseline" || name == "center") continue;
        const double v = values.at(name);
        const double h = std::max(std::abs(v) * 1e-4, 1e-4);
        auto bumped = values;
        bumped[name] = v + h;
        double fwhm_hi;
        try {
            fwhm_hi = lineshape::composite_fwhm(composite_from_map(bumped));
        } catch (const std::exception&) {
            continue;  // e.g. stepping a width to an invalid value
        }
        grad[static_cast<Eigen::Index>(j)] = (fwhm_hi - fwhm0) / h;
    }
    const double var = grad.dot(covariance * grad);
    return (var > 0.0) ? std::sqrt(var) : 0.0;
}

}  // namespace

void validate_spectrum(const Spectrum& spec) {
    const std::size_t n = spec.detuning_khz.size();
    if (n == 0) throw DataError("spectrum: no data rows");
    if (spec.counts.size() != n) {
        throw DataError("spectrum: detuning and counts column lengths differ");
    }
    if (!spec.sigma.empty() && spec.sigma.size() != n) {
        throw DataError("spectrum: sigma column length differs from grid");
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::string row = " (row " + std::to_string(i + 1) + ")";
        if (!std::isfinite(spec.detuning_khz[i])) {
            throw DataError("spectrum: non-finite detuning" + row);
        }
        if (!std::isfinite(spec.counts[i])) {
            throw DataError("spectrum: non-finite counts" + row);
        }
        if (i > 0 && !(spec.detuning_khz[i] > spec.detuning_khz[i - 1])) {
            throw DataError("spectrum: detuning grid not strictly increasing" + row);
        }
        if (!spec.sigma.empty()) {
            if (!std::isfinite(spec.sigma[i]) || !(spec.sigma[i] > 0.0)) {
                throw DataError("spectrum: non-positive uncertainty" + row);
            }
        }
    }
}

std::vector<double> effective_sigma(const Spectrum& spec) {
    if (!spec.sigma.empty()) return spec.sigma;
    std::vector<double> sig(spec.size());
    for (std::size_t i = 0; i < sig.size(); ++i) {
        sig[i] = std::sqrt(std::max(spec.counts[i], 1.0));
    }
    return sig;
}

const std::vector<std::string>& physics_parameter_names() { return kPhysicsNames; }

void FitConfig::validate() const {
    for (const auto& name : kNuisanceNames) {
        if (fixed.count(name)) {
            throw ConfigError("FitConfig: nuisance parameter '" + name +
                              "' cannot be fixed; it is always free");
        }
    }
    for (const auto& name : free) {
        if (fixed.count(name)) {
            throw ConfigError("FitConfig: parameter '" + name + "' is both free and fixed");
        }
        const bool physics =
            std::find(kPhysicsNames.begin(), kPhysicsNames.end(), name) != kPhysicsNames.end();
        const bool nuisance =
            std::find(kNuisanceNames.begin(), kNuisanceNames.end(), name) != kNuisanceNames.end();
        if (!physics && !nuisance) {
            throw ConfigError("FitConfig: unknown parameter '" + name + "'");
        }
    }
    for (const auto& name : kPhysicsNames) {
        if (!free.count(name) && !fixed.count(name)) {
            throw ConfigError("FitConfig: physics parameter '" + name +
                              "' must be either free or fixed");
        }
    }
}

void apply_physics(FitConfig& cfg, double nu_osc_hz, const PhysicsContext& ctx) {
    const auto widths = bands::tunneling_linewidths(nu_osc_hz, ctx.recoil_hz, ctx.convention);
    cfg.free.erase("gamma_tun_g");
    cfg.free.erase("gamma_tun_e");
    cfg.free.erase("weight_g");
    cfg.free.erase("weight_e");
    cfg.fixed["gamma_tun_g"] = widths.gamma_g_hz;
    cfg.fixed["gamma_tun_e"] = widths.gamma_e_hz;
    // Population-model weights fill in only where the caller has not pinned
    // them explicitly.
    if (!cfg.fixed.count("weight_g") && !cfg.fixed.count("weight_e")) {
        const auto w = population::weights_at(nu_osc_hz, ctx.temperature, ctx.s_ratio);
        cfg.fixed["weight_g"] = w.weight_g;
        cfg.fixed["weight_e"] = w.weight_e;
    }
}

lineshape::CompositeParams FitResult::composite() const { return composite_from_map(values); }

double data_fwhm_hz(const Spectrum& spec, double baseline) {
    const std::size_t n = spec.size();
    std::size_t peak = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (spec.counts[i] > spec.counts[peak]) peak = i;
    }
    const double half = 0.5 * (spec.counts[peak] - baseline);
    if (!(half > 0.0)) return std::numeric_limits<double>::quiet_NaN();

    auto crossing = [&](bool left) -> double {
        const std::ptrdiff_t step = left ? -1 : 1;
        std::ptrdiff_t i = static_cast<std::ptrdiff_t>(peak);
        while (true) {
            const std::ptrdiff_t j = i + step;
            if (j < 0 || j >= static_cast<std::ptrdiff_t>(n)) {
                return std::numeric_limits<double>::quiet_NaN();
            }
            const double yi = spec.counts[static_cast<std::size_t>(i)] - baseline;
            const double yj = spec.counts[static_cast<std::size_t>(j)] - baseline;
            if (yj <= half && yi > half) {
                const double xi = spec.detuning_khz[static_cast<std::size_t>(i)];
                const double xj = spec.detuning_khz[static_cast<std::size_t>(j)];
                return (xi + (half - yi) / (yj - yi) * (xj - xi)) * khz;
            }
            i = j;
        }
    };

    const double lo = crossing(true);
    const double hi = crossing(false);
    return hi - lo;  // NaN propagates
}

namespace {

FitResult run_single_fit(const Spectrum& spec, const FitConfig& cfg) {
    cfg.validate();
    validate_spectrum(spec);

    // Free vector: physics parameters in canonical order, then the nuisance.
    std::vector<std::string> free_names;
    for (const auto& name : kPhysicsNames) {
        if (cfg.free.count(name)) free_names.push_back(name);
    }
    for (const auto& name : kNuisanceNames) free_names.push_back(name);

    const std::size_t n_free = free_names.size();
    if (spec.size() < n_free) {
        throw DataError("fit: spectrum has fewer points (" + std::to_string(spec.size()) +
                        ") than free parameters (" + std::to_string(n_free) + ")");
    }

    const InitialEstimates est = estimate_from_data(spec);

    // Width guesses first; the amplitude scale depends on the resulting
    // peak density of the unit-amplitude model.
    std::map<std::string, double> guess = cfg.fixed;
    for (const auto& name : free_names) {
        if (name == "amplitude") continue;
        BoundSpec b = default_bound(name, est, spec, 1.0);
        if (auto it = cfg.initial.find(name); it != cfg.initial.end()) b.init = it->second;
        guess[name] = b.init;
    }
    const double density0 = initial_peak_density(guess);

    Eigen::VectorXd init(n_free), lo(n_free), hi(n_free), scale(n_free);
    for (std::size_t j = 0; j < n_free; ++j) {
        BoundSpec b = default_bound(free_names[j], est, spec, density0);
        if (auto it = cfg.bounds.find(free_names[j]); it != cfg.bounds.end()) {
            b.lo = it->second.first;
            b.hi = it->second.second;
        }
        if (auto it = cfg.initial.find(free_names[j]); it != cfg.initial.end()) {
            b.init = it->second;
        }
        init[static_cast<Eigen::Index>(j)] = std::clamp(b.init, b.lo, b.hi);
        lo[static_cast<Eigen::Index>(j)] = b.lo;
        hi[static_cast<Eigen::Index>(j)] = b.hi;
        scale[static_cast<Eigen::Index>(j)] = b.scale;
    }

    const std::vector<double> sig = weights_for(spec, cfg.unweighted);

    auto param_map = [&](const Eigen::VectorXd& p) {
        std::map<std::string, double> m = cfg.fixed;
        for (std::size_t j = 0; j < n_free; ++j) {
            m[free_names[j]] = p[static_cast<Eigen::Index>(j)];
        }
        return m;
    };

    ResidualFn residual_fn = [&](const Eigen::VectorXd& p) {
        const auto c = composite_from_map(param_map(p));
        Eigen::VectorXd r(static_cast<Eigen::Index>(spec.size()));
        for (std::size_t i = 0; i < spec.size(); ++i) {
            const double model = lineshape::rayleigh_lineshape(spec.detuning_khz[i] * khz, c);
            r[static_cast<Eigen::Index>(i)] = (model - spec.counts[i]) / sig[i];
        }
        return r;
    };

    LeastSquaresOptions opts;
    opts.max_iterations = cfg.max_iterations;
    opts.rel_step_tol = cfg.rel_step_tol;
    const LeastSquaresResult lsq = minimize_least_squares(residual_fn, init, lo, hi, scale, opts);

    FitResult out;
    out.free_names = free_names;
    out.values = param_map(lsq.params);
    out.covariance = lsq.covariance;
    for (std::size_t j = 0; j < n_free; ++j) {
        out.uncertainties[free_names[j]] =
            std::sqrt(std::max(lsq.covariance(static_cast<Eigen::Index>(j),
                                              static_cast<Eigen::Index>(j)),
                               0.0));
    }
    out.residuals.assign(lsq.residuals.data(), lsq.residuals.data() + lsq.residuals.size());
    out.chi2 = lsq.chi2;
    out.dof = static_cast<int>(spec.size()) - static_cast<int>(n_free);
    out.reduced_chi2 = (out.dof > 0) ? lsq.chi2 / out.dof : std::numeric_limits<double>::quiet_NaN();
    out.iterations = lsq.iterations;
    out.converged = lsq.converged;
    out.degenerate = lsq.degenerate;

    try {
        out.model_fwhm_hz = lineshape::composite_fwhm(out.composite());
        out.model_fwhm_unc_hz =
            propagate_fwhm_uncertainty(out.values, free_names, lsq.covariance, out.model_fwhm_hz);
    } catch (const std::exception&) {
        out.model_fwhm_hz = std::numeric_limits<double>::quiet_NaN();
        out.model_fwhm_unc_hz = std::numeric_limits<double>::quiet_NaN();
    }
    out.data_fwhm_hz = data_fwhm_hz(spec, out.values.at("baseline"));
    return out;
}

}  // namespace

FitResult fit_single_atom(const Spectrum& spec, const FitConfig& cfg) {
    return run_single_fit(spec, cfg);
}

JointFitResult fit_constant_depletion(const std::vector<Spectrum>& specs, const FitConfig& cfg,
                                      const PhysicsContext& ctx) {
    if (specs.empty()) throw DataError("fit_constant_depletion: empty spectrum set");

    // Per-spectrum configs carrying the band-solver widths and weights.
    std::vector<FitConfig> per_cfg(specs.size(), cfg);
    for (std::size_t s = 0; s < specs.size(); ++s) {
        validate_spectrum(specs[s]);
        if (!(specs[s].nu_osc_khz > 0.0)) {
            throw DataError("fit_constant_depletion: spectrum " + std::to_string(s + 1) +
                            " lacks a positive nu_osc");
        }
        apply_physics(per_cfg[s], specs[s].nu_osc_khz * khz, ctx);
        per_cfg[s].validate();
    }

    std::vector<std::string> shared_names;
    for (const auto& name : kPhysicsNames) {
        if (per_cfg[0].free.count(name)) shared_names.push_back(name);
    }
    const std::size_t n_shared = shared_names.size();
    const std::size_t n_params = n_shared + 3 * specs.size();

    std::size_t total_points = 0;
    for (const auto& s : specs) total_points += s.size();
    if (total_points < n_params) {
        throw DataError("fit_constant_depletion: fewer data points than free parameters");
    }

    std::vector<InitialEstimates> ests;
    ests.reserve(specs.size());
    for (const auto& s : specs) ests.push_back(estimate_from_data(s));

    Eigen::VectorXd init(n_params), lo(n_params), hi(n_params), scale(n_params);
    std::map<std::string, double> shared_guess;
    for (std::size_t j = 0; j < n_shared; ++j) {
        BoundSpec b = default_bound(shared_names[j], ests[0], specs[0], 1.0);
        if (auto it = cfg.bounds.find(shared_names[j]); it != cfg.bounds.end()) {
            b.lo = it->second.first;
            b.hi = it->second.second;
        }
        if (auto it = cfg.initial.find(shared_names[j]); it != cfg.initial.end()) {
            b.init = it->second;
        }
        init[static_cast<Eigen::Index>(j)] = std::clamp(b.init, b.lo, b.hi);
        lo[static_cast<Eigen::Index>(j)] = b.lo;
        hi[static_cast<Eigen::Index>(j)] = b.hi;
        scale[static_cast<Eigen::Index>(j)] = b.scale;
        shared_guess[shared_names[j]] = init[static_cast<Eigen::Index>(j)];
    }
    for (std::size_t s = 0; s < specs.size(); ++s) {
        auto guess = per_cfg[s].fixed;
        guess.insert(shared_guess.begin(), shared_guess.end());
        const double density0 = initial_peak_density(guess);
        for (std::size_t k = 0; k < kNuisanceNames.size(); ++k) {
            const BoundSpec b = default_bound(kNuisanceNames[k], ests[s], specs[s], density0);
            const auto idx = static_cast<Eigen::Index>(n_shared + 3 * s + k);
            init[idx] = std::clamp(b.init, b.lo, b.hi);
            lo[idx] = b.lo;
            hi[idx] = b.hi;
            scale[idx] = b.scale;
        }
    }

    std::vector<std::vector<double>> sig;
    sig.reserve(specs.size());
    for (const auto& s : specs) sig.push_back(weights_for(s, cfg.unweighted));

    auto spectrum_map = [&](const Eigen::VectorXd& p, std::size_t s) {
        std::map<std::string, double> m = per_cfg[s].fixed;
        for (std::size_t j = 0; j < n_shared; ++j) {
            m[shared_names[j]] = p[static_cast<Eigen::Index>(j)];
        }
        for (std::size_t k = 0; k < kNuisanceNames.size(); ++k) {
            m[kNuisanceNames[k]] = p[static_cast<Eigen::Index>(n_shared + 3 * s + k)];
        }
        return m;
    };

    ResidualFn residual_fn = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(total_points));
        Eigen::Index row = 0;
        for (std::size_t s = 0; s < specs.size(); ++s) {
            const auto c = composite_from_map(spectrum_map(p, s));
            for (std::size_t i = 0; i < specs[s].size(); ++i) {
                const double model =
                    lineshape::rayleigh_lineshape(specs[s].detuning_khz[i] * khz, c);
                r[row++] = (model - specs[s].counts[i]) / sig[s][i];
            }
        }
        return r;
    };

    LeastSquaresOptions opts;
    opts.max_iterations = cfg.max_iterations;
    opts.rel_step_tol = cfg.rel_step_tol;
    const LeastSquaresResult lsq = minimize_least_squares(residual_fn, init, lo, hi, scale, opts);

    JointFitResult out;
    out.chi2 = lsq.chi2;
    out.dof = static_cast<int>(total_points) - static_cast<int>(n_params);
    out.reduced_chi2 = (out.dof > 0) ? lsq.chi2 / out.dof : std::numeric_limits<double>::quiet_NaN();
    out.iterations = lsq.iterations;
    out.converged = lsq.converged;
    for (std::size_t j = 0; j < n_shared; ++j) {
        out.shared_values[shared_names[j]] = lsq.params[static_cast<Eigen::Index>(j)];
        out.shared_uncertainties[shared_names[j]] =
            std::sqrt(std::max(lsq.covariance(static_cast<Eigen::Index>(j),
                                              static_cast<Eigen::Index>(j)),
                               0.0));
    }

    Eigen::Index row = 0;
    for (std::size_t s = 0; s < specs.size(); ++s) {
        FitResult fr;
        fr.free_names = shared_names;
        fr.free_names.insert(fr.free_names.end(), kNuisanceNames.begin(), kNuisanceNames.end());
        fr.values = spectrum_map(lsq.params, s);
        fr.uncertainties = out.shared_uncertainties;
        for (std::size_t k = 0; k < kNuisanceNames.size(); ++k) {
            const auto idx = static_cast<Eigen::Index>(n_shared + 3 * s + k);
            fr.uncertainties[kNuisanceNames[k]] =
                std::sqrt(std::max(lsq.covariance(idx, idx), 0.0));
        }
        fr.residuals.assign(lsq.residuals.data() + row,
                            lsq.residuals.data() + row + static_cast<Eigen::Index>(specs[s].size()));
        row += static_cast<Eigen::Index>(specs[s].size());
        fr.chi2 = std::accumulate(fr.residuals.begin(), fr.residuals.end(), 0.0,
                                  [](double acc, double v) { return acc + v * v; });
        fr.dof = static_cast<int>(specs[s].size()) - 3;
        fr.reduced_chi2 =
            (fr.dof > 0) ? fr.chi2 / fr.dof : std::numeric_limits<double>::quiet_NaN();
        fr.converged = lsq.converged;
        fr.degenerate = lsq.degenerate;
        fr.iterations = lsq.iterations;

        // Shared-parameter covariance block for FWHM propagation.
        Eigen::MatrixXd cov(n_shared + 3, n_shared + 3);
        auto global_index = [&](std::size_t local) {
            return (local < n_shared) ? static_cast<Eigen::Index>(local)
                                      : static_cast<Eigen::Index>(n_shared + 3 * s + local - n_shared);
        };
        for (std::size_t a = 0; a < n_shared + 3; ++a) {
            for (std::size_t b = 0; b < n_shared + 3; ++b) {
                cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                    lsq.covariance(global_index(a), global_index(b));
            }
        }
        fr.covariance = cov;
        try {
            fr.model_fwhm_hz = lineshape::composite_fwhm(fr.composite());
            fr.model_fwhm_unc_hz =
                propagate_fwhm_uncertainty(fr.values, fr.free_names, cov, fr.model_fwhm_hz);
        } catch (const std::exception&) {
            fr.model_fwhm_hz = std::numeric_limits<double>::quiet_NaN();
            fr.model_fwhm_unc_hz = std::numeric_limits<double>::quiet_NaN();
        }
        fr.data_fwhm_hz = data_fwhm_hz(specs[s], fr.values.at("baseline"));
        out.per_spectrum.push_back(std::move(fr));
    }
    return out;
}

Spectrum synth_spectrum(const lineshape::CompositeParams& params,
                        const std::vector<double>& grid_khz, double noise_sigma,
                        std::uint64_t seed) {
    if (noise_sigma < 0.0) {
        throw std::invalid_argument("synth_spectrum: noise sigma must be non-negative");
    }
    Spectrum spec;
    spec.detuning_khz = grid_khz;
    spec.counts.reserve(grid_khz.size());
    spec.sigma.assign(grid_khz.size(), noise_sigma > 0.0 ? noise_sigma : 1.0);

    // Fixed Box-Muller over the raw 64-bit stream keeps the sequence stable
    // across standard libraries.
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() {
        return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    };
    for (double x : grid_khz) {
        double value = lineshape::rayleigh_lineshape(x * khz, params);
        if (noise_sigma > 0.0) {
            const double u1 = uniform();
            const double u2 = uniform();
            value += noise_sigma * std::sqrt(-2.0 * std::log(u1)) *
                     std::cos(2.0 * std::numbers::pi * u2);
        }
        spec.counts.push_back(value);
    }
    validate_spectrum(spec);
    return spec;
}

std::vector<CurvePoint> fwhm_curve(const std::vector<double>& nu_osc_khz, const FitConfig& cfg,
                                   const PhysicsContext& ctx) {
    for (const auto& name : {"gamma_dep", "sigma_res", "sigma_inh_g", "sigma_inh_e"}) {
        if (!cfg.fixed.count(name)) {
            throw ConfigError(std::string("fwhm_curve: '") + name +
                              "' must be fixed in the configuration");
        }
    }
    std::vector<CurvePoint> curve;
    curve.reserve(nu_osc_khz.size());
    for (double nu : nu_osc_khz) {
        if (!(nu > 0.0)) throw ConfigError("fwhm_curve: nu_osc values must be positive");
        const auto widths = bands::tunneling_linewidths(nu * khz, ctx.recoil_hz, ctx.convention);
        const auto w = population::weights_at(nu * khz, ctx.temperature, ctx.s_ratio);

        lineshape::CompositeParams c;
        c.ground.gamma_tun_hz = widths.gamma_g_hz;
        c.ground.gamma_dep_hz = cfg.fixed.at("gamma_dep");
        c.ground.sigma_res_hz = cfg.fixed.at("sigma_res");
        c.ground.sigma_inh_hz = cfg.fixed.at("sigma_inh_g");
        c.excited.gamma_tun_hz = widths.gamma_e_hz;
        c.excited.gamma_dep_hz = cfg.fixed.at("gamma_dep");
        c.excited.sigma_res_hz = cfg.fixed.at("sigma_res");
        c.excited.sigma_inh_hz = cfg.fixed.at("sigma_inh_e");
        c.weight_g = w.weight_g;
        c.weight_e = w.weight_e;

        CurvePoint pt;
        pt.nu_osc_khz = nu;
        pt.fwhm_hz = lineshape::composite_fwhm(c, 1e-12);
        pt.gamma_tun_g_hz = widths.gamma_g_hz;
        pt.gamma_tun_e_hz = widths.gamma_e_hz;
        pt.weight_g = w.weight_g;
        pt.weight_e = w.weight_e;
        curve.push_back(pt);
    }
    return curve;
}

}  // namespace latline::specfit
