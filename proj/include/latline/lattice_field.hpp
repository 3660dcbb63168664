#pragma once

// Six-beam phase-stabilized optical lattice: the individual traveling-wave
// fields, their time-factorized sum E_tot = 2 cos(w*tau) * A(r), the
// interference intensity |A|^2, and analysis of the micro-potential wells.
//
// Coordinate convention: the envelope is evaluated in shifted coordinates
//   X = x + (phi6 - phi1) / 2k,  Y = y + (phi5 - phi2) / 2k,
//   Z = z + (phi3 - phi4) / 2k,
// so a configuration built from folded path lengths (d1, d2) gives
// X = x + d1 + d2 and Y = y + d2. The compact closed form of the intensity
// uses coordinates displaced a quarter wavelength along X relative to the
// envelope expansion; see intensity_closed_form().

#include <array>
#include <span>
#include <vector>

#include "latline/constants.hpp"

namespace latline::lattice {

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

// Real amplitude components along the lab axes x(i), y(j), z(k).
struct FieldVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double squared_norm() const { return x * x + y * y + z * z; }
    double norm() const;
};

FieldVector operator+(const FieldVector& a, const FieldVector& b);
FieldVector operator-(const FieldVector& a, const FieldVector& b);
FieldVector operator*(double s, const FieldVector& v);

struct BeamConfig {
    std::array<double, 6> phases{};  // phase factor of each traveling wave [rad]
    double d1 = 0.0;                 // folded path lengths [m]
    double d2 = 0.0;
    double wavelength = rb85_d2_wavelength_m;  // [m]
    double phase_tolerance = 1e-9;   // allowed spread of the pairwise phase sums [rad]

    double wavenumber() const;         // k = 2 pi / lambda
    double angular_frequency() const;  // w = k c

    // Pairwise phase sums (phi1+phi6), (phi2+phi5), (phi3+phi4); all three
    // must agree for the common time phase to factor out of the sum.
    double pair_sum(int which) const;
    double phase_mismatch() const;  // max spread between the three sums
    bool phase_stabilized() const { return phase_mismatch() <= phase_tolerance; }

    double time_phase(double t) const;   // w*tau = w*t + (phi1+phi6)/2
    double time_phase_offset() const;    // tau - t

    // Envelope coordinate offsets derived from the phase differences.
    double x_offset() const;
    double y_offset() const;
    double z_offset() const;

    // Phase assignment realizing folded path lengths d1, d2: the envelope
    // offsets become exactly (d1 + d2, d2, 0).
    static BeamConfig from_geometry(double d1, double d2,
                                    double wavelength = rb85_d2_wavelength_m,
                                    double common_phase = 0.0);

    // Validating constructor: throws ConfigError if the phase constraint is
    // violated beyond tol, or the wavelength is not positive.
    static BeamConfig checked(const std::array<double, 6>& phases, double d1, double d2,
                              double wavelength, double tol = 1e-9);
};

// Field of beam `index` in 1..6 at position r and time t (unit amplitude).
FieldVector beam_field(int index, const Point3& r, double t, const BeamConfig& cfg);

// Component-wise sum of the six beams.
FieldVector total_field(const Point3& r, double t, const BeamConfig& cfg);

// Time-independent envelope A(r) with total_field = 2 cos(w*tau) * A(r).
// Throws ConfigError when the phase constraint is violated beyond tolerance.
FieldVector envelope(const Point3& r, const BeamConfig& cfg);

// |A(r)|^2 from the envelope expansion.
double intensity(const Point3& r, const BeamConfig& cfg);

// Compact closed form 3 - 2 sin(kY)cos(kZ) + 2 sin(kX)sin(kZ) + 2 cos(kX)cos(kY).
// Its coordinates sit a quarter wavelength from the envelope expansion:
//   intensity(x, y, z) == intensity_closed_form(x + lambda/4, y, z).
double intensity_closed_form(const Point3& r, const BeamConfig& cfg);

// Quarter-wavelength displacement along X between the two intensity
// evaluators, as a fraction of the wavelength.
inline constexpr double closed_form_x_shift = 0.25;

// Max over the samples of |total_field(r,t) - 2 cos(w*tau) A(r)|. Near machine
// epsilon when the phase constraint holds; order of the mismatch otherwise.
double verify_factorization(const BeamConfig& cfg, std::span<const Point3> points,
                            std::span<const double> times);

struct Box {
    Point3 lo;
    Point3 hi;
};

struct PotentialSample {
    Point3 position;
    double intensity = 0.0;  // |A|^2, dimensionless
    double potential = 0.0;  // -Vs * |A|^2 / max|A|^2, in the unit of Vs
};

struct PotentialGrid {
    std::array<int, 3> shape{};  // samples per axis
    Box cell;
    double depth_scale = 0.0;     // Vs
    double peak_intensity = 0.0;  // normalization max |A|^2
    std::vector<PotentialSample> samples;  // row-major, z fastest

    const PotentialSample& at(int i, int j, int k) const;
};

// Light-shift potential sampled on a regular grid over `cell` (endpoints
// included, resolution >= 2 samples per axis). Values lie in [-Vs, 0].
PotentialGrid potential_grid(const BeamConfig& cfg, const Box& cell, int resolution,
                             double depth_scale);

// Global maximum of |A|^2 over one lattice period (coarse scan + local ascent).
double peak_intensity(const BeamConfig& cfg);

struct MinimaOptions {
    int coarse_resolution = 64;        // seed grid per axis
    double gradient_tolerance = 1e-10; // on grad of |A|^2/max, in k*r units
    double dedup_tolerance = 1e-6;     // in units of lambda
    int max_iterations = 20000;
};

// All potential minima (intensity maxima) in `cell`, deduplicated by lattice
// periodicity and folded into the first period of the cell. The cell must
// span at least one wavelength per axis.
std::vector<Point3> find_minima(const BeamConfig& cfg, const Box& cell,
                                const MinimaOptions& opts = {});

struct WellCharacterization {
    Point3 minimum;
    std::array<double, 3> hessian_eigenvalues{};  // J/m^2, ascending
    std::array<double, 3> frequencies_hz{};       // ascending
    double mass_kg = rb85_mass_kg;
};

// Harmonic analysis of a potential well: central-difference Hessian of
// V = -Vs |A|^2 / max|A|^2 (step lambda/1000), eigen-decomposition, and
// oscillation frequencies nu_i = sqrt(eig_i / m) / 2 pi. Throws NumericError
// if the Hessian is not positive definite at `minimum`.
WellCharacterization characterize_well(const BeamConfig& cfg, const Point3& minimum,
                                       double depth_scale_joule,
                                       double mass_kg = rb85_mass_kg);

}  // namespace latline::lattice
