#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "latline/band_structure.hpp"
#include "latline/constants.hpp"
#include "latline/lattice_field.hpp"
#include "latline/lineshape.hpp"
#include "latline/population.hpp"
#include "latline/spectrum_fit.hpp"

namespace py = pybind11;
using namespace latline;

namespace {

lattice::Point3 to_point(const std::array<double, 3>& r) { return {r[0], r[1], r[2]}; }

std::array<double, 3> from_field(const lattice::FieldVector& f) { return {f.x, f.y, f.z}; }

py::dict fit_result_dict(const specfit::FitResult& fit) {
    py::dict d;
    d["values"] = fit.values;
    d["uncertainties"] = fit.uncertainties;
    d["chi2"] = fit.chi2;
    d["reduced_chi2"] = fit.reduced_chi2;
    d["dof"] = fit.dof;
    d["iterations"] = fit.iterations;
    d["converged"] = fit.converged;
    d["degenerate"] = fit.degenerate;
    d["model_fwhm_hz"] = fit.model_fwhm_hz;
    d["model_fwhm_unc_hz"] = fit.model_fwhm_unc_hz;
    d["data_fwhm_hz"] = fit.data_fwhm_hz;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Phase-stabilized optical-lattice fields, Bloch-band tunneling widths and "
              "Rayleigh-peak lineshape fitting";

    m.attr("planck_h") = planck_h;
    m.attr("boltzmann_kb") = boltzmann_kb;
    m.attr("rb85_mass_kg") = rb85_mass_kg;
    m.attr("rb85_d2_wavelength_m") = rb85_d2_wavelength_m;
    m.def("recoil_frequency_hz", &recoil_frequency_hz, py::arg("mass_kg"),
          py::arg("wavelength_m"));

    // lattice field ----------------------------------------------------------
    py::class_<lattice::BeamConfig>(m, "BeamConfig")
        .def(py::init([](std::array<double, 6> phases, double d1, double d2, double wavelength,
                         double tol) {
                 return lattice::BeamConfig{phases, d1, d2, wavelength, tol};
             }),
             py::arg("phases"), py::arg("d1") = 0.0, py::arg("d2") = 0.0,
             py::arg("wavelength") = rb85_d2_wavelength_m, py::arg("phase_tolerance") = 1e-9)
        .def_static("from_geometry", &lattice::BeamConfig::from_geometry, py::arg("d1"),
                    py::arg("d2"), py::arg("wavelength") = rb85_d2_wavelength_m,
                    py::arg("common_phase") = 0.0)
        .def_static("checked", &lattice::BeamConfig::checked, py::arg("phases"), py::arg("d1"),
                    py::arg("d2"), py::arg("wavelength"), py::arg("tol") = 1e-9)
        .def_readwrite("phases", &lattice::BeamConfig::phases)
        .def_readwrite("d1", &lattice::BeamConfig::d1)
        .def_readwrite("d2", &lattice::BeamConfig::d2)
        .def_readwrite("wavelength", &lattice::BeamConfig::wavelength)
        .def("wavenumber", &lattice::BeamConfig::wavenumber)
        .def("angular_frequency", &lattice::BeamConfig::angular_frequency)
        .def("phase_mismatch", &lattice::BeamConfig::phase_mismatch)
        .def("phase_stabilized", &lattice::BeamConfig::phase_stabilized)
        .def("x_offset", &lattice::BeamConfig::x_offset)
        .def("y_offset", &lattice::BeamConfig::y_offset)
        .def("z_offset", &lattice::BeamConfig::z_offset);

    m.def(
        "beam_field",
        [](int index, std::array<double, 3> r, double t, const lattice::BeamConfig& cfg) {
            return from_field(lattice::beam_field(index, to_point(r), t, cfg));
        },
        py::arg("index"), py::arg("r"), py::arg("t"), py::arg("cfg"));
    m.def(
        "total_field",
        [](std::array<double, 3> r, double t, const lattice::BeamConfig& cfg) {
            return from_field(lattice::total_field(to_point(r), t, cfg));
        },
        py::arg("r"), py::arg("t"), py::arg("cfg"));
    m.def(
        "envelope",
        [](std::array<double, 3> r, const lattice::BeamConfig& cfg) {
            return from_field(lattice::envelope(to_point(r), cfg));
        },
        py::arg("r"), py::arg("cfg"));
    m.def(
        "intensity",
        [](std::array<double, 3> r, const lattice::BeamConfig& cfg) {
            return lattice::intensity(to_point(r), cfg);
        },
        py::arg("r"), py::arg("cfg"));
    m.def(
        "intensity_closed_form",
        [](std::array<double, 3> r, const lattice::BeamConfig& cfg) {
            return lattice::intensity_closed_form(to_point(r), cfg);
        },
        py::arg("r"), py::arg("cfg"));
    m.def(
        "verify_factorization",
        [](const lattice::BeamConfig& cfg, const std::vector<std::array<double, 3>>& pts,
           const std::vector<double>& times) {
            std::vector<lattice::Point3> points;
            points.reserve(pts.size());
            for (const auto& r : pts) points.push_back(to_point(r));
            return lattice::verify_factorization(cfg, points, times);
        },
        py::arg("cfg"), py::arg("points"), py::arg("times"));
    m.def("peak_intensity", &lattice::peak_intensity, py::arg("cfg"));
    m.def(
        "find_minima",
        [](const lattice::BeamConfig& cfg, std::array<double, 3> lo, std::array<double, 3> hi) {
            const auto minima = lattice::find_minima(cfg, {to_point(lo), to_point(hi)});
            std::vector<std::array<double, 3>> out;
            out.reserve(minima.size());
            for (const auto& p : minima) out.push_back({p.x, p.y, p.z});
            return out;
        },
        py::arg("cfg"), py::arg("cell_lo"), py::arg("cell_hi"));
    m.def(
        "characterize_well",
        [](const lattice::BeamConfig& cfg, std::array<double, 3> minimum, double depth_j,
           double mass) {
            const auto well =
                lattice::characterize_well(cfg, to_point(minimum), depth_j, mass);
            py::dict d;
            d["minimum"] = std::array<double, 3>{well.minimum.x, well.minimum.y, well.minimum.z};
            d["hessian_eigenvalues"] = well.hessian_eigenvalues;
            d["frequencies_hz"] = well.frequencies_hz;
            return d;
        },
        py::arg("cfg"), py::arg("minimum"), py::arg("depth_scale_j"),
        py::arg("mass_kg") = rb85_mass_kg);

    // band structure -----------------------------------------------------------
    py::class_<bands::LatticeDepth>(m, "LatticeDepth")
        .def(py::init([](double s, double recoil_hz) {
                 return bands::LatticeDepth{s, recoil_hz};
             }),
             py::arg("s"), py::arg("recoil_hz"))
        .def_readwrite("s", &bands::LatticeDepth::s)
        .def_readwrite("recoil_hz", &bands::LatticeDepth::recoil_hz);

    py::enum_<bands::SpreadConvention>(m, "SpreadConvention")
        .value("hwhm", bands::SpreadConvention::hwhm)
        .value("fwhm", bands::SpreadConvention::fwhm);

    m.def("band_energies", &bands::band_energies, py::arg("q_over_k"), py::arg("depth"),
          py::arg("n_max"), py::arg("cutoff") = bands::default_plane_wave_cutoff);
    m.def("bandwidth", &bands::bandwidth, py::arg("band_index"), py::arg("depth"),
          py::arg("cutoff") = bands::default_plane_wave_cutoff);
    m.def(
        "depth_from_oscillation",
        [](double nu_osc_hz, double recoil_hz) {
            return bands::depth_from_oscillation(nu_osc_hz, recoil_hz).s;
        },
        py::arg("nu_osc_hz"), py::arg("recoil_hz"));
    m.def(
        "tunneling_linewidths",
        [](double nu_osc_hz, double recoil_hz, bands::SpreadConvention convention) {
            const auto w = bands::tunneling_linewidths(nu_osc_hz, recoil_hz, convention);
            return std::pair<double, double>{w.gamma_g_hz, w.gamma_e_hz};
        },
        py::arg("nu_osc_hz"), py::arg("recoil_hz"),
        py::arg("convention") = bands::SpreadConvention::hwhm);

    // lineshape ------------------------------------------------------------------
    m.def(
        "lorentzian",
        [](double w, double gamma_hz) { return lineshape::lorentzian(w, {gamma_hz}); },
        py::arg("omega_hz"), py::arg("gamma_hz"));
    m.def(
        "gaussian", [](double w, double sigma_hz) { return lineshape::gaussian(w, {sigma_hz}); },
        py::arg("omega_hz"), py::arg("sigma_hz"));
    m.def(
        "voigt",
        [](double w, double gamma_hz, double sigma_hz) {
            return lineshape::voigt(w, {gamma_hz}, {sigma_hz});
        },
        py::arg("omega_hz"), py::arg("gamma_hz"), py::arg("sigma_hz"));
    m.def(
        "compose_gamma",
        [](double tun, double dep) { return lineshape::compose_gamma(tun, dep).gamma_hz; },
        py::arg("gamma_tun_hz"), py::arg("gamma_dep_hz"));
    m.def(
        "compose_sigma",
        [](double res, double inh) { return lineshape::compose_sigma(res, inh).sigma_hz; },
        py::arg("sigma_res_hz"), py::arg("sigma_inh_hz"));

    py::class_<lineshape::ComponentParams>(m, "ComponentParams")
        .def(py::init([](double tun, double dep, double res, double inh) {
                 return lineshape::ComponentParams{tun, dep, res, inh};
             }),
             py::arg("gamma_tun_hz") = 0.0, py::arg("gamma_dep_hz") = 0.0,
             py::arg("sigma_res_hz") = 0.0, py::arg("sigma_inh_hz") = 0.0)
        .def_readwrite("gamma_tun_hz", &lineshape::ComponentParams::gamma_tun_hz)
        .def_readwrite("gamma_dep_hz", &lineshape::ComponentParams::gamma_dep_hz)
        .def_readwrite("sigma_res_hz", &lineshape::ComponentParams::sigma_res_hz)
        .def_readwrite("sigma_inh_hz", &lineshape::ComponentParams::sigma_inh_hz);

    py::class_<lineshape::CompositeParams>(m, "CompositeParams")
        .def(py::init<>())
        .def_readwrite("ground", &lineshape::CompositeParams::ground)
        .def_readwrite("excited", &lineshape::CompositeParams::excited)
        .def_readwrite("weight_g", &lineshape::CompositeParams::weight_g)
        .def_readwrite("weight_e", &lineshape::CompositeParams::weight_e)
        .def_readwrite("center_hz", &lineshape::CompositeParams::center_hz)
        .def_readwrite("amplitude", &lineshape::CompositeParams::amplitude)
        .def_readwrite("baseline", &lineshape::CompositeParams::baseline);

    m.def("rayleigh_lineshape", &lineshape::rayleigh_lineshape, py::arg("omega_hz"),
          py::arg("params"));
    m.def("composite_fwhm", &lineshape::composite_fwhm, py::arg("params"),
          py::arg("rel_tol") = 1e-9);

    // population -------------------------------------------------------------------
    py::class_<population::TemperatureModel>(m, "TemperatureModel")
        .def(py::init<>())
        .def_readwrite("a0_uK", &population::TemperatureModel::a0_uK)
        .def_readwrite("a1_uK_per_khz", &population::TemperatureModel::a1_uK_per_khz)
        .def_readwrite("a2_uK_per_khz2", &population::TemperatureModel::a2_uK_per_khz2)
        .def_readwrite("nu_min_khz", &population::TemperatureModel::nu_min_khz)
        .def_readwrite("nu_max_khz", &population::TemperatureModel::nu_max_khz);

    m.def("default_temperature_model", &population::default_temperature_model);
    m.def("temperature_uK", &population::temperature_uK, py::arg("nu_osc_khz"),
          py::arg("model"));
    m.def("population_ratio", &population::population_ratio, py::arg("nu_osc_hz"),
          py::arg("temperature_K"));
    m.def(
        "composite_weights",
        [](double ratio, double s_ratio) {
            const auto w = population::composite_weights(ratio, s_ratio);
            return std::pair<double, double>{w.weight_g, w.weight_e};
        },
        py::arg("ratio"), py::arg("s_ratio") = population::default_s_ratio);

    // spectrum fitting -----------------------------------------------------------
    py::class_<specfit::Spectrum>(m, "Spectrum")
        .def(py::init<>())
        .def_readwrite("detuning_khz", &specfit::Spectrum::detuning_khz)
        .def_readwrite("counts", &specfit::Spectrum::counts)
        .def_readwrite("sigma", &specfit::Spectrum::sigma)
        .def_readwrite("nu_osc_khz", &specfit::Spectrum::nu_osc_khz)
        .def_readwrite("label", &specfit::Spectrum::label)
        .def("__len__", &specfit::Spectrum::size);

    py::class_<specfit::FitConfig>(m, "FitConfig")
        .def(py::init<>())
        .def_readwrite("free", &specfit::FitConfig::free)
        .def_readwrite("fixed", &specfit::FitConfig::fixed)
        .def_readwrite("bounds", &specfit::FitConfig::bounds)
        .def_readwrite("initial", &specfit::FitConfig::initial)
        .def_readwrite("unweighted", &specfit::FitConfig::unweighted)
        .def_readwrite("max_iterations", &specfit::FitConfig::max_iterations)
        .def_readwrite("rel_step_tol", &specfit::FitConfig::rel_step_tol)
        .def("validate", &specfit::FitConfig::validate);

    py::class_<specfit::PhysicsContext>(m, "PhysicsContext")
        .def(py::init<>())
        .def_readwrite("recoil_hz", &specfit::PhysicsContext::recoil_hz)
        .def_readwrite("convention", &specfit::PhysicsContext::convention)
        .def_readwrite("temperature", &specfit::PhysicsContext::temperature)
        .def_readwrite("s_ratio", &specfit::PhysicsContext::s_ratio);

    m.def("apply_physics", &specfit::apply_physics, py::arg("cfg"), py::arg("nu_osc_hz"),
          py::arg("ctx"));
    m.def(
        "fit_single_atom",
        [](const specfit::Spectrum& spec, const specfit::FitConfig& cfg) {
            return fit_result_dict(specfit::fit_single_atom(spec, cfg));
        },
        py::arg("spectrum"), py::arg("config"));
    m.def(
        "fit_constant_depletion",
        [](const std::vector<specfit::Spectrum>& specs, const specfit::FitConfig& cfg,
           const specfit::PhysicsContext& ctx) {
            const auto joint = specfit::fit_constant_depletion(specs, cfg, ctx);
            py::dict d;
            d["shared_values"] = joint.shared_values;
            d["shared_uncertainties"] = joint.shared_uncertainties;
            d["chi2"] = joint.chi2;
            d["reduced_chi2"] = joint.reduced_chi2;
            d["dof"] = joint.dof;
            d["converged"] = joint.converged;
            py::list per;
            for (const auto& fr : joint.per_spectrum) per.append(fit_result_dict(fr));
            d["per_spectrum"] = per;
            return d;
        },
        py::arg("spectra"), py::arg("config"), py::arg("ctx"));
    m.def("synth_spectrum", &specfit::synth_spectrum, py::arg("params"), py::arg("grid_khz"),
          py::arg("noise_sigma"), py::arg("seed"));
    m.def(
        "fwhm_curve",
        [](const std::vector<double>& nus, const specfit::FitConfig& cfg,
           const specfit::PhysicsContext& ctx) {
            const auto curve = specfit::fwhm_curve(nus, cfg, ctx);
            std::vector<std::pair<double, double>> out;
            out.reserve(curve.size());
            for (const auto& pt : curve) out.emplace_back(pt.nu_osc_khz, pt.fwhm_hz);
            return out;
        },
        py::arg("nu_osc_khz"), py::arg("config"), py::arg("ctx"));
    m.def("data_fwhm_hz", &specfit::data_fwhm_hz, py::arg("spectrum"), py::arg("baseline"));
}
