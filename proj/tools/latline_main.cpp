// latline: lattice-field synthesis, Bloch-band tunneling widths, Rayleigh-peak
// lineshape evaluation, and spectrum fitting from the command line.
//
// Frequencies are kHz at every external surface (flags, CSV, JSON); the
// computational core works in Hz. Every run writes a JSON manifest with the
// resolved configuration and input/output checksums next to its primary
// output. Relative output paths are resolved inside $LATLINE_OUT_DIR when that
// variable is set.

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include "latline/band_structure.hpp"
#include "latline/constants.hpp"
#include "latline/errors.hpp"
#include "latline/io.hpp"
#include "latline/lattice_field.hpp"
#include "latline/lineshape.hpp"
#include "latline/population.hpp"
#include "latline/spectrum_fit.hpp"

namespace fs = std::filesystem;
using namespace latline;

namespace {

constexpr const char* kVersion = "0.1.0";

bool g_verbose = false;

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_config = 2,
    exit_data = 3,
    exit_numeric = 4,
};

fs::path resolve_output(const fs::path& path) {
    if (path.is_absolute()) return path;
    if (const char* dir = std::getenv("LATLINE_OUT_DIR")) {
        return fs::path(dir) / path;
    }
    return path;
}

struct ManifestScope {
    io::RunManifest manifest;
    fs::path manifest_path;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    ManifestScope(const std::string& subcommand, const fs::path& primary_output,
                  const std::string& manifest_override) {
        manifest.version = kVersion;
        manifest.subcommand = subcommand;
        manifest_path = !manifest_override.empty()
                            ? resolve_output(manifest_override)
                            : fs::path(primary_output.string() + ".manifest.json");
    }

    void finish() {
        manifest.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        manifest.write(manifest_path);
        if (g_verbose) {
            for (const auto& [path, checksum] : manifest.outputs) {
                std::cerr << "wrote " << path << " (" << checksum << ")\n";
            }
            std::cerr << "manifest " << manifest_path.string() << "\n";
        }
    }
};

lattice::BeamConfig beam_config_from_json(const nlohmann::json& cfg) {
    const double wavelength = io::config_number(cfg, "wavelength_nm",
                                                rb85_d2_wavelength_m * 1e9) *
                              1e-9;
    if (cfg.contains("phases_rad")) {
        const auto& arr = cfg.at("phases_rad");
        if (!arr.is_array() || arr.size() != 6) {
            throw ConfigError("phases_rad must be an array of six values");
        }
        std::array<double, 6> phases{};
        for (std::size_t i = 0; i < 6; ++i) phases[i] = arr[i].get<double>();
        const double d1 = io::config_number(cfg, "d1_m", 0.0);
        const double d2 = io::config_number(cfg, "d2_m", 0.0);
        const double tol = io::config_number(cfg, "phase_tolerance_rad", 1e-9);
        if (io::config_flag(cfg, "enforce_phase_constraint", true)) {
            return lattice::BeamConfig::checked(phases, d1, d2, wavelength, tol);
        }
        lattice::BeamConfig bc{phases, d1, d2, wavelength, tol};
        return bc;
    }
    const double d1 = io::config_number(cfg, "d1_m", 0.0);
    const double d2 = io::config_number(cfg, "d2_m", 0.0);
    const double common = io::config_number(cfg, "common_phase_rad", 0.0);
    return lattice::BeamConfig::from_geometry(d1, d2, wavelength, common);
}

population::TemperatureModel temperature_model_from_json(const nlohmann::json& cfg) {
    population::TemperatureModel model = population::default_temperature_model();
    if (cfg.contains("temperature_model")) {
        const auto& tm = cfg.at("temperature_model");
        model.a0_uK = io::config_number(tm, "a0_uK", model.a0_uK);
        model.a1_uK_per_khz = io::config_number(tm, "a1_uK_per_khz", model.a1_uK_per_khz);
        model.a2_uK_per_khz2 = io::config_number(tm, "a2_uK_per_khz2", model.a2_uK_per_khz2);
        model.nu_min_khz = io::config_number(tm, "nu_min_khz", model.nu_min_khz);
        model.nu_max_khz = io::config_number(tm, "nu_max_khz", model.nu_max_khz);
    }
    return model;
}

specfit::PhysicsContext physics_from_json(const nlohmann::json& cfg,
                                          population::TemperatureModel::RangePolicy policy) {
    specfit::PhysicsContext ctx;
    const double mass = io::config_number(cfg, "mass_kg", rb85_mass_kg);
    const double wavelength =
        io::config_number(cfg, "wavelength_nm", rb85_d2_wavelength_m * 1e9) * 1e-9;
    ctx.recoil_hz = io::config_number(cfg, "recoil_khz",
                                      recoil_frequency_hz(mass, wavelength) / 1e3) *
                    1e3;
    ctx.convention = io::config_flag(cfg, "spread_is_fwhm", false)
                         ? bands::SpreadConvention::fwhm
                         : bands::SpreadConvention::hwhm;
    ctx.temperature = temperature_model_from_json(cfg);
    ctx.temperature.out_of_range = policy;
    ctx.s_ratio = io::config_number(cfg, "s_ratio", population::default_s_ratio);
    return ctx;
}

// Frequencies in fit/model configs are written in kHz; convert to Hz here.
specfit::FitConfig fit_config_from_json(const nlohmann::json& cfg) {
    specfit::FitConfig fc;
    const auto widths = {"gamma_tun_g", "gamma_tun_e", "gamma_dep",
                         "sigma_res",   "sigma_inh_g", "sigma_inh_e"};
    if (cfg.contains("free")) {
        for (const auto& name : cfg.at("free")) {
            fc.free.insert(name.get<std::string>());
        }
    } else {
        fc.free = {"sigma_inh_g", "sigma_inh_e"};
    }
    if (cfg.contains("fixed")) {
        for (const auto& [key, value] : cfg.at("fixed").items()) {
            const bool is_width =
                std::find(widths.begin(), widths.end(), key) != widths.end();
            fc.fixed[key] = value.get<double>() * (is_width ? 1e3 : 1.0);
        }
    }
    if (cfg.contains("initial")) {
        for (const auto& [key, value] : cfg.at("initial").items()) {
            const bool is_width =
                std::find(widths.begin(), widths.end(), key) != widths.end();
            fc.initial[key] = value.get<double>() * (is_width ? 1e3 : 1.0);
        }
    }
    if (cfg.contains("bounds")) {
        for (const auto& [key, value] : cfg.at("bounds").items()) {
            const bool is_width =
                std::find(widths.begin(), widths.end(), key) != widths.end();
            const double unit = is_width ? 1e3 : 1.0;
            fc.bounds[key] = {value.at(0).get<double>() * unit,
                              value.at(1).get<double>() * unit};
        }
    }
    fc.unweighted = io::config_flag(cfg, "unweighted", false);
    fc.max_iterations = static_cast<int>(io::config_number(cfg, "max_iterations", 500));
    fc.rel_step_tol = io::config_number(cfg, "rel_step_tol", 1e-8);
    return fc;
}

lineshape::CompositeParams composite_from_json(const nlohmann::json& cfg) {
    lineshape::CompositeParams p;
    p.ground.gamma_tun_hz = io::require_number(cfg, "gamma_tun_g_khz") * 1e3;
    p.ground.gamma_dep_hz = io::require_number(cfg, "gamma_dep_khz") * 1e3;
    p.ground.sigma_res_hz = io::config_number(cfg, "sigma_res_khz", 0.0) * 1e3;
    p.ground.sigma_inh_hz = io::require_number(cfg, "sigma_inh_g_khz") * 1e3;
    p.excited.gamma_tun_hz = io::require_number(cfg, "gamma_tun_e_khz") * 1e3;
    p.excited.gamma_dep_hz = p.ground.gamma_dep_hz;
    p.excited.sigma_res_hz = p.ground.sigma_res_hz;
    p.excited.sigma_inh_hz = io::require_number(cfg, "sigma_inh_e_khz") * 1e3;
    p.weight_g = io::config_number(cfg, "weight_g", 0.28);
    p.weight_e = io::config_number(cfg, "weight_e", 0.72);
    p.center_hz = io::config_number(cfg, "center_khz", 0.0) * 1e3;
    p.amplitude = io::config_number(cfg, "amplitude", 1.0);
    p.baseline = io::config_number(cfg, "baseline", 0.0);
    return p;
}

double unit_scale_from_hz(const std::string& unit, double recoil_hz) {
    if (unit == "hz") return 1.0;
    if (unit == "khz") return 1e-3;
    if (unit == "er") return 1.0 / recoil_hz;
    throw ConfigError("unknown frequency unit '" + unit + "' (use hz, khz or er)");
}

// --- subcommand implementations ---------------------------------------------

int run_lattice(const std::string& config_path, const std::string& cell_spec, int resolution,
                double depth_khz, const std::string& out, const std::string& binary_out,
                bool wells, const std::string& manifest_path) {
    const auto cfg =
        config_path.empty() ? nlohmann::json::object() : io::load_config(config_path);
    const lattice::BeamConfig beams = beam_config_from_json(cfg);

    int nx = 1, ny = 1, nz = 1;
    if (std::sscanf(cell_spec.c_str(), "%dx%dx%d", &nx, &ny, &nz) != 3 || nx < 1 || ny < 1 ||
        nz < 1) {
        throw ConfigError("cell must look like 1x1x1 (periods per axis)");
    }
    const double lambda = beams.wavelength;
    const lattice::Box cell{{0, 0, 0}, {nx * lambda, ny * lambda, nz * lambda}};
    const double depth_j = depth_khz * 1e3 * planck_h;

    const fs::path out_path = resolve_output(out);
    ManifestScope scope("lattice", out_path, manifest_path);
    if (!config_path.empty()) scope.manifest.add_input(config_path);
    scope.manifest.config = {{"cell", cell_spec},
                             {"resolution", resolution},
                             {"depth_khz", depth_khz},
                             {"wells", wells},
                             {"beam_config", cfg}};

    const auto grid = lattice::potential_grid(beams, cell, resolution, depth_j);
    io::Table table;
    table.columns = {"x_m", "y_m", "z_m", "intensity", "potential_j"};
    table.rows.reserve(grid.samples.size());
    for (const auto& s : grid.samples) {
        table.rows.push_back({s.position.x, s.position.y, s.position.z, s.intensity,
                              s.potential});
    }
    io::save_table(table, out_path);
    scope.manifest.add_output(out_path);

    if (!binary_out.empty()) {
        const fs::path bin_path = resolve_output(binary_out);
        // Row-major float64 potential values preceded by a JSON header line.
        nlohmann::json header;
        header["dims"] = {grid.shape[0], grid.shape[1], grid.shape[2]};
        header["cell_m"] = {{"lo", {cell.lo.x, cell.lo.y, cell.lo.z}},
                            {"hi", {cell.hi.x, cell.hi.y, cell.hi.z}}};
        header["depth_scale_j"] = grid.depth_scale;
        header["wavelength_m"] = lambda;
        header["order"] = "row-major z-fastest";
        std::ofstream bin(bin_path, std::ios::binary);
        if (!bin) throw DataError("cannot write '" + bin_path.string() + "'");
        const std::string head = header.dump() + "\n";
        bin.write(head.data(), static_cast<std::streamsize>(head.size()));
        for (const auto& s : grid.samples) {
            bin.write(reinterpret_cast<const char*>(&s.potential), sizeof(double));
        }
        bin.close();
        scope.manifest.add_output(bin_path);
    }

    if (wells) {
        const auto minima = lattice::find_minima(beams, cell);
        std::cout << "wells: " << minima.size() << "\n";
        for (const auto& m : minima) {
            const auto well = lattice::characterize_well(beams, m, depth_j);
            std::cout << "  (" << io::format_double(m.x / lambda) << ", "
                      << io::format_double(m.y / lambda) << ", "
                      << io::format_double(m.z / lambda) << ") lambda  nu_khz = ["
                      << io::format_double(well.frequencies_hz[0] / 1e3) << ", "
                      << io::format_double(well.frequencies_hz[1] / 1e3) << ", "
                      << io::format_double(well.frequencies_hz[2] / 1e3) << "]\n";
        }
    }

    scope.finish();
    return exit_ok;
}

int run_bands(double s_min, double s_max, int steps, const std::string& unit,
              const std::string& config_path, const std::string& out,
              const std::string& manifest_path) {
    const auto cfg =
        config_path.empty() ? nlohmann::json::object() : io::load_config(config_path);
    const auto ctx =
        physics_from_json(cfg, population::TemperatureModel::RangePolicy::clamp);
    if (!(s_min >= 0.0) || !(s_max >= s_min) || steps < 1) {
        throw ConfigError("bands: need 0 <= s-min <= s-max and steps >= 1");
    }
    const double scale = unit_scale_from_hz(unit, ctx.recoil_hz);

    const fs::path out_path = resolve_output(out);
    ManifestScope scope("bands", out_path, manifest_path);
    if (!config_path.empty()) scope.manifest.add_input(config_path);
    scope.manifest.config = {{"s_min", s_min}, {"s_max", s_max},   {"steps", steps},
                             {"unit", unit},   {"physics", cfg}};

    io::Table table;
    table.columns = {"s", "nu_osc_" + unit, "bw_s_" + unit, "bw_p_" + unit};
    for (int i = 0; i < steps; ++i) {
        const double s = steps == 1 ? s_min : s_min + (s_max - s_min) * i / (steps - 1);
        const bands::LatticeDepth depth{s, ctx.recoil_hz};
        const double nu = 2.0 * std::sqrt(s) * ctx.recoil_hz;
        table.rows.push_back({s, nu * scale, bands::bandwidth(0, depth) * scale,
                              bands::bandwidth(1, depth) * scale});
    }
    io::save_table(table, out_path);
    scope.manifest.add_output(out_path);
    scope.finish();
    return exit_ok;
}

int run_model(const std::string& params_path, double lo_khz, double hi_khz, int points,
              bool with_fwhm, const std::string& out, const std::string& svg,
              const std::string& manifest_path) {
    const auto cfg = io::load_config(params_path);
    const auto params = composite_from_json(cfg);
    if (!(hi_khz > lo_khz) || points < 2) {
        throw ConfigError("model: need from < to and at least 2 points");
    }

    const fs::path out_path = resolve_output(out);
    ManifestScope scope("model", out_path, manifest_path);
    scope.manifest.add_input(params_path);
    scope.manifest.config = {{"params", cfg},   {"from_khz", lo_khz}, {"to_khz", hi_khz},
                             {"points", points}, {"fwhm", with_fwhm}};

    io::Table table;
    table.columns = {"detuning_khz", "value"};
    std::vector<double> xs, ys;
    for (int i = 0; i < points; ++i) {
        const double x = lo_khz + (hi_khz - lo_khz) * i / (points - 1);
        const double y = lineshape::rayleigh_lineshape(x * 1e3, params);
        table.rows.push_back({x, y});
        xs.push_back(x);
        ys.push_back(y);
    }
    std::vector<std::string> comments;
    if (with_fwhm) {
        const double width = lineshape::composite_fwhm(params);
        comments.push_back("fwhm_khz = " + io::format_double(width / 1e3));
        std::cout << "fwhm_khz " << io::format_double(width / 1e3) << "\n";
    }
    io::save_table(table, out_path, comments);
    scope.manifest.add_output(out_path);

    if (!svg.empty()) {
        const fs::path svg_path = resolve_output(svg);
        io::emit_plot({{"model", xs, ys, false}},
                      {"composite lineshape", "detuning (kHz)", "counts"}, svg_path);
        scope.manifest.add_output(svg_path);
    }
    scope.finish();
    return exit_ok;
}

int run_weights(double nu_khz, const std::string& config_path,
                const std::string& manifest_path) {
    const auto cfg =
        config_path.empty() ? nlohmann::json::object() : io::load_config(config_path);
    const auto ctx =
        physics_from_json(cfg, population::TemperatureModel::RangePolicy::reject);

    const fs::path out_path = resolve_output("weights.txt");
    ManifestScope scope("weights", out_path, manifest_path);
    if (!config_path.empty()) scope.manifest.add_input(config_path);
    scope.manifest.config = {{"nu_osc_khz", nu_khz}, {"physics", cfg}};

    const double t_uK = population::temperature_uK(nu_khz, ctx.temperature);
    const double ratio = population::population_ratio(nu_khz * 1e3, t_uK * 1e-6);
    const auto w = population::composite_weights(ratio, ctx.s_ratio);
    std::cout << "temperature_uK " << io::format_double(t_uK) << "\n"
              << "ratio " << io::format_double(w.ratio) << "\n"
              << "weight_g " << io::format_double(w.weight_g) << "\n"
              << "weight_e " << io::format_double(w.weight_e) << "\n";
    scope.finish();
    return exit_ok;
}

int run_synth(const std::string& params_path, double lo_khz, double hi_khz, int points,
              double noise, std::uint64_t seed, double nu_khz, const std::string& out,
              const std::string& manifest_path) {
    const auto cfg = io::load_config(params_path);
    const auto params = composite_from_json(cfg);
    if (!(hi_khz > lo_khz) || points < 2) {
        throw ConfigError("synth: need from < to and at least 2 points");
    }
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] = lo_khz + (hi_khz - lo_khz) * i / (points - 1);
    }

    const fs::path out_path = resolve_output(out);
    ManifestScope scope("synth", out_path, manifest_path);
    scope.manifest.add_input(params_path);
    scope.manifest.seed = seed;
    scope.manifest.config = {{"params", cfg}, {"from_khz", lo_khz}, {"to_khz", hi_khz},
                             {"points", points}, {"noise", noise},  {"nu_osc_khz", nu_khz}};

    specfit::Spectrum spec = specfit::synth_spectrum(params, grid, noise, seed);
    spec.nu_osc_khz = nu_khz;
    io::save_spectrum(spec, out_path);
    scope.manifest.add_output(out_path);
    scope.finish();
    return exit_ok;
}

nlohmann::json fit_result_json(const specfit::FitResult& fit) {
    nlohmann::json j;
    for (const auto& [name, value] : fit.values) {
        const bool is_weight = name.rfind("weight", 0) == 0;
        const bool is_count = name == "amplitude" || name == "baseline";
        j["values_khz"][name] = (is_weight || is_count) ? value : value / 1e3;
    }
    for (const auto& [name, value] : fit.uncertainties) {
        const bool is_count = name == "amplitude" || name == "baseline";
        j["uncertainties_khz"][name] = is_count ? value : value / 1e3;
    }
    j["chi2"] = fit.chi2;
    j["reduced_chi2"] = fit.reduced_chi2;
    j["dof"] = fit.dof;
    j["iterations"] = fit.iterations;
    j["converged"] = fit.converged;
    j["degenerate"] = fit.degenerate;
    j["model_fwhm_khz"] = fit.model_fwhm_hz / 1e3;
    j["model_fwhm_unc_khz"] = fit.model_fwhm_unc_hz / 1e3;
    if (std::isfinite(fit.data_fwhm_hz)) {
        j["data_fwhm_khz"] = fit.data_fwhm_hz / 1e3;
    } else {
        j["data_fwhm_khz"] = nullptr;
    }
    return j;
}

void write_fit_overlay(const specfit::Spectrum& spec, const specfit::FitResult& fit,
                       const fs::path& svg_path) {
    std::vector<double> xs(spec.detuning_khz), model, comp_g, comp_e;
    auto params = fit.composite();
    lineshape::CompositeParams only_g = params;
    only_g.weight_e = 0.0;
    lineshape::CompositeParams only_e = params;
    only_e.weight_g = 0.0;
    for (double x : xs) {
        model.push_back(lineshape::rayleigh_lineshape(x * 1e3, params));
        comp_g.push_back(lineshape::rayleigh_lineshape(x * 1e3, only_g));
        comp_e.push_back(lineshape::rayleigh_lineshape(x * 1e3, only_e));
    }
    io::emit_plot({{"data", xs, spec.counts, true},
                   {"fit", xs, model, false},
                   {"ground", xs, comp_g, false},
                   {"excited", xs, comp_e, false}},
                  {"Rayleigh-peak fit", "detuning (kHz)", "counts"}, svg_path);
}

int run_fit(const std::vector<std::string>& spectrum_paths, const std::string& config_path,
            const std::string& protocol, const std::string& out,
            const std::string& residuals_out, const std::string& svg,
            const std::string& manifest_path) {
    if (spectrum_paths.empty()) throw ConfigError("fit: at least one --spectrum required");
    const auto cfg = io::load_config(config_path);
    specfit::FitConfig fc = fit_config_from_json(cfg);

    std::vector<specfit::Spectrum> specs;
    for (const auto& p : spectrum_paths) {
        specs.push_back(io::load_spectrum(p));
        if (cfg.contains("nu_osc_khz")) {
            specs.back().nu_osc_khz = io::require_number(cfg, "nu_osc_khz");
        }
    }

    const fs::path out_path = resolve_output(out);
    ManifestScope scope("fit", out_path, manifest_path);
    scope.manifest.add_input(config_path);
    for (const auto& p : spectrum_paths) scope.manifest.add_input(p);
    scope.manifest.config = {{"fit_config", cfg}, {"protocol", protocol}};

    nlohmann::json result;
    specfit::FitResult overlay_fit;
    const specfit::Spectrum* overlay_spec = nullptr;

    if (protocol == "single-atom") {
        if (specs.size() != 1) {
            throw ConfigError("fit: the single-atom protocol takes exactly one spectrum");
        }
        fc.protocol = specfit::Protocol::single_atom;
        // Band-solver widths and population weights are derived when the
        // config names an oscillation frequency (or opts in and the spectrum
        // carries one); otherwise the fixed values are used verbatim.
        const bool use_physics = cfg.contains("nu_osc_khz") ||
                                 io::config_flag(cfg, "use_band_physics", false);
        if (use_physics) {
            const double nu_khz = cfg.contains("nu_osc_khz")
                                      ? io::require_number(cfg, "nu_osc_khz")
                                      : specs[0].nu_osc_khz;
            if (!(nu_khz > 0.0)) {
                throw ConfigError("fit: no oscillation frequency available for band physics");
            }
            const auto ctx = physics_from_json(
                cfg, population::TemperatureModel::RangePolicy::clamp);
            specfit::apply_physics(fc, nu_khz * 1e3, ctx);
        }
        const auto fit = specfit::fit_single_atom(specs[0], fc);
        result = fit_result_json(fit);
        result["protocol"] = "single-atom";
        overlay_fit = fit;
        overlay_spec = &specs[0];
    } else if (protocol == "constant-depletion") {
        fc.protocol = specfit::Protocol::constant_depletion;
        const auto ctx =
            physics_from_json(cfg, population::TemperatureModel::RangePolicy::clamp);
        const auto joint = specfit::fit_constant_depletion(specs, fc, ctx);
        result["protocol"] = "constant-depletion";
        for (const auto& [name, value] : joint.shared_values) {
            result["shared_khz"][name] = value / 1e3;
            result["shared_unc_khz"][name] = joint.shared_uncertainties.at(name) / 1e3;
        }
        result["chi2"] = joint.chi2;
        result["reduced_chi2"] = joint.reduced_chi2;
        result["dof"] = joint.dof;
        result["converged"] = joint.converged;
        result["iterations"] = joint.iterations;
        for (std::size_t i = 0; i < joint.per_spectrum.size(); ++i) {
            auto sub = fit_result_json(joint.per_spectrum[i]);
            sub["label"] = specs[i].label;
            sub["nu_osc_khz"] = specs[i].nu_osc_khz;
            result["spectra"].push_back(sub);
        }
        overlay_fit = joint.per_spectrum.front();
        overlay_spec = &specs.front();
    } else {
        throw ConfigError("fit: protocol must be single-atom or constant-depletion");
    }

    std::ofstream(out_path) << result.dump(2) << "\n";
    scope.manifest.add_output(out_path);

    if (!residuals_out.empty() && overlay_spec) {
        const fs::path res_path = resolve_output(residuals_out);
        io::Table table;
        table.columns = {"detuning_khz", "weighted_residual"};
        for (std::size_t i = 0; i < overlay_spec->size(); ++i) {
            table.rows.push_back({overlay_spec->detuning_khz[i], overlay_fit.residuals[i]});
        }
        io::save_table(table, res_path);
        scope.manifest.add_output(res_path);
    }
    if (!svg.empty() && overlay_spec) {
        const fs::path svg_path = resolve_output(svg);
        write_fit_overlay(*overlay_spec, overlay_fit, svg_path);
        scope.manifest.add_output(svg_path);
    }
    scope.finish();
    return exit_ok;
}

int run_curve(const std::string& config_path, double lo_khz, double hi_khz, int points,
              const std::string& out, const std::string& svg,
              const std::string& manifest_path) {
    const auto cfg = io::load_config(config_path);
    specfit::FitConfig fc = fit_config_from_json(cfg);
    const auto ctx = physics_from_json(cfg, population::TemperatureModel::RangePolicy::clamp);
    if (!(lo_khz > 0.0) || !(hi_khz > lo_khz) || points < 2) {
        throw ConfigError("curve: need 0 < from < to and at least 2 points");
    }

    std::vector<double> nus(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        nus[static_cast<std::size_t>(i)] = lo_khz + (hi_khz - lo_khz) * i / (points - 1);
    }

    const fs::path out_path = resolve_output(out);
    ManifestScope scope("curve", out_path, manifest_path);
    scope.manifest.add_input(config_path);
    scope.manifest.config = {{"config", cfg}, {"from_khz", lo_khz}, {"to_khz", hi_khz},
                             {"points", points}};

    const auto curve = specfit::fwhm_curve(nus, fc, ctx);
    io::Table table;
    table.columns = {"nu_osc_khz", "fwhm_khz", "gamma_tun_g_khz", "gamma_tun_e_khz",
                     "weight_g",   "weight_e"};
    std::vector<double> xs, ys;
    for (const auto& pt : curve) {
        table.rows.push_back({pt.nu_osc_khz, pt.fwhm_hz / 1e3, pt.gamma_tun_g_hz / 1e3,
                              pt.gamma_tun_e_hz / 1e3, pt.weight_g, pt.weight_e});
        xs.push_back(pt.nu_osc_khz);
        ys.push_back(pt.fwhm_hz / 1e3);
    }
    io::save_table(table, out_path);
    scope.manifest.add_output(out_path);
    if (!svg.empty()) {
        const fs::path svg_path = resolve_output(svg);
        io::emit_plot({{"model fwhm", xs, ys, false}},
                      {"Rayleigh-peak width vs oscillation frequency",
                       "nu_osc (kHz)", "FWHM (kHz)"},
                      svg_path);
        scope.manifest.add_output(svg_path);
    }
    scope.finish();
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"optical-lattice field synthesis and Rayleigh-peak lineshape analysis"};
    app.set_version_flag("--version", kVersion);
    app.add_flag("-v,--verbose", g_verbose, "report outputs and manifest paths on stderr");
    app.require_subcommand(1);

    std::string config_path, out, binary_out, svg, residuals_out, manifest_path;
    std::string cell_spec = "1x1x1", unit = "khz", protocol = "single-atom";
    std::vector<std::string> spectrum_paths;
    int resolution = 32, steps = 40, points = 201;
    double depth_khz = 100.0, s_min = 1.0, s_max = 40.0;
    double lo_khz = -60.0, hi_khz = 60.0, noise = 0.0, nu_khz = 20.0;
    std::uint64_t seed = 0;
    bool wells = false, with_fwhm = false;

    auto* lattice_cmd = app.add_subcommand("lattice", "sample the light-shift potential grid");
    lattice_cmd->add_option("--config", config_path, "beam configuration file");
    lattice_cmd->add_option("--cell", cell_spec, "periods per axis, e.g. 1x1x1");
    lattice_cmd->add_option("--res", resolution, "samples per axis")->check(CLI::Range(2, 128));
    lattice_cmd->add_option("--depth-khz", depth_khz, "well-depth scale Vs in h*kHz");
    lattice_cmd->add_option("--out", out, "output CSV path")->required();
    lattice_cmd->add_option("--binary-out", binary_out, "optional float64 dump with JSON header");
    lattice_cmd->add_flag("--wells", wells, "report well positions and frequencies");
    lattice_cmd->add_option("--manifest", manifest_path, "manifest path override");

    auto* bands_cmd = app.add_subcommand("bands", "tunneling bandwidths vs lattice depth");
    bands_cmd->add_option("--s-min", s_min, "minimum depth in recoil units");
    bands_cmd->add_option("--s-max", s_max, "maximum depth in recoil units");
    bands_cmd->add_option("--steps", steps, "table rows")->check(CLI::Range(1, 100000));
    bands_cmd->add_option("--unit", unit, "output unit: hz, khz or er");
    bands_cmd->add_option("--config", config_path, "physics configuration file");
    bands_cmd->add_option("--out", out, "output CSV path")->required();
    bands_cmd->add_option("--manifest", manifest_path, "manifest path override");

    auto* model_cmd = app.add_subcommand("model", "evaluate the composite lineshape");
    model_cmd->add_option("--params", config_path, "lineshape parameter file")->required();
    model_cmd->add_option("--from-khz", lo_khz, "grid start");
    model_cmd->add_option("--to-khz", hi_khz, "grid end");
    model_cmd->add_option("--points", points, "grid points")->check(CLI::Range(2, 1000000));
    model_cmd->add_flag("--fwhm", with_fwhm, "append the model FWHM");
    model_cmd->add_option("--out", out, "output CSV path")->required();
    model_cmd->add_option("--svg", svg, "optional SVG plot path");
    model_cmd->add_option("--manifest", manifest_path, "manifest path override");

    auto* weights_cmd = app.add_subcommand("weights", "population ratio and component weights");
    weights_cmd->add_option("--nu-khz", nu_khz, "oscillation frequency")->required();
    weights_cmd->add_option("--config", config_path, "physics configuration file");
    weights_cmd->add_option("--manifest", manifest_path, "manifest path override");

    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic spectrum");
    synth_cmd->add_option("--params", config_path, "lineshape parameter file")->required();
    synth_cmd->add_option("--from-khz", lo_khz, "grid start");
    synth_cmd->add_option("--to-khz", hi_khz, "grid end");
    synth_cmd->add_option("--points", points, "grid points")->check(CLI::Range(2, 1000000));
    synth_cmd->add_option("--noise", noise, "Gaussian noise sigma in counts");
    synth_cmd->add_option("--seed", seed, "noise seed");
    synth_cmd->add_option("--nu-khz", nu_khz, "oscillation frequency metadata");
    synth_cmd->add_option("--out", out, "output CSV path")->required();
    synth_cmd->add_option("--manifest", manifest_path, "manifest path override");

    auto* fit_cmd = app.add_subcommand("fit", "fit spectra to the composite model");
    fit_cmd->add_option("--spectrum", spectrum_paths, "spectrum CSV (repeatable)")->required();
    fit_cmd->add_option("--config", config_path, "fit configuration file")->required();
    fit_cmd->add_option("--protocol", protocol, "single-atom or constant-depletion");
    fit_cmd->add_option("--out", out, "result JSON path")->required();
    fit_cmd->add_option("--residuals", residuals_out, "optional residual CSV path");
    fit_cmd->add_option("--svg", svg, "optional overlay plot path");
    fit_cmd->add_option("--manifest", manifest_path, "manifest path override");

    auto* curve_cmd = app.add_subcommand("curve", "model FWHM vs oscillation frequency");
    curve_cmd->add_option("--config", config_path, "width configuration file")->required();
    curve_cmd->add_option("--from-khz", lo_khz, "first oscillation frequency");
    curve_cmd->add_option("--to-khz", hi_khz, "last oscillation frequency");
    curve_cmd->add_option("--points", points, "curve points")->check(CLI::Range(2, 100000));
    curve_cmd->add_option("--out", out, "output CSV path")->required();
    curve_cmd->add_option("--svg", svg, "optional SVG plot path");
    curve_cmd->add_option("--manifest", manifest_path, "manifest path override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_usage;
    }

    try {
        if (lattice_cmd->parsed()) {
            return run_lattice(config_path, cell_spec, resolution, depth_khz, out, binary_out,
                               wells, manifest_path);
        }
        if (bands_cmd->parsed()) {
            return run_bands(s_min, s_max, steps, unit, config_path, out, manifest_path);
        }
        if (model_cmd->parsed()) {
            return run_model(config_path, lo_khz, hi_khz, points, with_fwhm, out, svg,
                             manifest_path);
        }
        if (weights_cmd->parsed()) {
            return run_weights(nu_khz, config_path, manifest_path);
        }
        if (synth_cmd->parsed()) {
            return run_synth(config_path, lo_khz, hi_khz, points, noise, seed, nu_khz, out,
                             manifest_path);
        }
        if (fit_cmd->parsed()) {
            return run_fit(spectrum_paths, config_path, protocol, out, residuals_out, svg,
                           manifest_path);
        }
        if (curve_cmd->parsed()) {
            return run_curve(config_path, lo_khz, hi_khz, points, out, svg, manifest_path);
        }
        std::cerr << "error: unknown subcommand\n";
        return exit_usage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return exit_data;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return exit_numeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numeric;
    }
}
