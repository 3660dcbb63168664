#pragma once

// Fitting of Rayleigh-peak spectra to the two-component Voigt model, under two
// protocols: per-spectrum fits with the inhomogeneous widths free, and joint
// fits of a spectrum set sharing a single depletion width. Also provides the
// synthetic-spectrum generator and the model FWHM-vs-oscillation-frequency
// curve. Frequencies are handled in Hz internally; spectra carry kHz grids as
// stored on disk.

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "latline/band_structure.hpp"
#include "latline/lineshape.hpp"
#include "latline/population.hpp"

namespace latline::specfit {

struct Spectrum {
    std::vector<double> detuning_khz;  // strictly increasing
    std::vector<double> counts;
    std::vector<double> sigma;         // per-point uncertainty; empty = Poisson default
    double nu_osc_khz = 0.0;
    std::string label;

    std::size_t size() const { return detuning_khz.size(); }
};

// Throws DataError naming the first offending row (1-based).
void validate_spectrum(const Spectrum& spec);

// sqrt(max(counts, 1)) where no uncertainty column was provided.
std::vector<double> effective_sigma(const Spectrum& spec);

enum class Protocol { single_atom, constant_depletion };

// Model parameters, by canonical name. Physics parameters:
//   gamma_tun_g, gamma_tun_e, gamma_dep, sigma_res, sigma_inh_g, sigma_inh_e,
//   weight_g, weight_e        (all widths in Hz, weights dimensionless)
// Nuisance parameters amplitude, center, baseline are always free.
const std::vector<std::string>& physics_parameter_names();

struct FitConfig {
    std::set<std::string> free;             // physics parameters to fit
    std::map<std::string, double> fixed;    // the rest, with values
    std::map<std::string, std::pair<double, double>> bounds;  // optional overrides
    std::map<std::string, double> initial;  // optional initial-guess overrides
    Protocol protocol = Protocol::single_atom;
    bool unweighted = false;
    int max_iterations = 500;
    double rel_step_tol = 1e-8;

    // Throws ConfigError unless every physics parameter is in exactly one of
    // free/fixed and no nuisance parameter is fixed.
    void validate() const;
};

// Source of the per-spectrum physics: tunneling widths from the band solver
// and component weights from the population model.
struct PhysicsContext {
    double recoil_hz = recoil_frequency_hz(rb85_mass_kg, rb85_d2_wavelength_m);
    bands::SpreadConvention convention = bands::SpreadConvention::hwhm;
    population::TemperatureModel temperature = population::default_temperature_model();
    double s_ratio = population::default_s_ratio;
};

// Fills gamma_tun_g/e and weight_g/e for the given oscillation frequency into
// cfg.fixed (existing entries are overwritten).
void apply_physics(FitConfig& cfg, double nu_osc_hz, const PhysicsContext& ctx);

struct FitResult {
    std::vector<std::string> free_names;            // optimizer vector order
    std::map<std::string, double> values;           // all parameters, Hz
    std::map<std::string, double> uncertainties;    // free parameters, 1 sigma
    Eigen::MatrixXd covariance;                     // free-parameter covariance
    std::vector<double> residuals;                  // weighted
    double chi2 = 0.0;
    double reduced_chi2 = 0.0;
    int dof = 0;
    int iterations = 0;
    bool converged = false;
    bool degenerate = false;
    double model_fwhm_hz = 0.0;
    double model_fwhm_unc_hz = 0.0;
    double data_fwhm_hz = 0.0;  // NaN when no half crossing exists in the data

    lineshape::CompositeParams composite() const;   // best-fit model parameters
};

FitResult fit_single_atom(const Spectrum& spec, const FitConfig& cfg);

struct JointFitResult {
    std::map<std::string, double> shared_values;         // Hz
    std::map<std::string, double> shared_uncertainties;  // 1 sigma
    std::vector<FitResult> per_spectrum;
    double chi2 = 0.0;
    double reduced_chi2 = 0.0;
    int dof = 0;
    int iterations = 0;
    bool converged = false;
};

// Joint fit over a spectrum set: free physics parameters are shared, the
// nuisance triple is independent per spectrum, and the tunneling widths and
// weights are derived per spectrum from its nu_osc through `ctx`.
JointFitResult fit_constant_depletion(const std::vector<Spectrum>& specs, const FitConfig& cfg,
                                      const PhysicsContext& ctx);

// Model evaluated on `grid_khz` plus seeded Gaussian noise of the given
// standard deviation. The noise generator is a fixed Box-Muller construction,
// reproducible across platforms for a given seed.
Spectrum synth_spectrum(const lineshape::CompositeParams& params,
                        const std::vector<double>& grid_khz, double noise_sigma,
                        std::uint64_t seed);

struct CurvePoint {
    double nu_osc_khz = 0.0;
    double fwhm_hz = 0.0;
    double gamma_tun_g_hz = 0.0;
    double gamma_tun_e_hz = 0.0;
    double weight_g = 0.0;
    double weight_e = 0.0;
};

// Model FWHM versus oscillation frequency: tunneling widths from the band
// solver, weights from the population model, fixed widths from cfg.fixed
// (gamma_dep, sigma_res, sigma_inh_g, sigma_inh_e).
std::vector<CurvePoint> fwhm_curve(const std::vector<double>& nu_osc_khz, const FitConfig& cfg,
                                   const PhysicsContext& ctx);

// FWHM of the measured points themselves, by linear interpolation of the
// half-maximum crossings around the peak; NaN when either crossing is absent.
double data_fwhm_hz(const Spectrum& spec, double baseline);

}  // namespace latline::specfit
