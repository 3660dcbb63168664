#include "latline/lattice_field.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "latline/errors.hpp"

namespace latline::lattice {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

double FieldVector::norm() const { return std::sqrt(squared_norm()); }

FieldVector operator+(const FieldVector& a, const FieldVector& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
}

FieldVector operator-(const FieldVector& a, const FieldVector& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
}

FieldVector operator*(double s, const FieldVector& v) {
    return {s * v.x, s * v.y, s * v.z};
}

double BeamConfig::wavenumber() const { return two_pi / wavelength; }

double BeamConfig::angular_frequency() const { return wavenumber() * speed_of_light; }

double BeamConfig::pair_sum(int which) const {
    switch (which) {
        case 0: return phases[0] + phases[5];
        case 1: return phases[1] + phases[4];
        case 2: return phases[2] + phases[3];
        default: throw std::invalid_argument("pair_sum: index must be 0, 1 or 2");
    }
}

double BeamConfig::phase_mismatch() const {
    const double s0 = pair_sum(0), s1 = pair_sum(1), s2 = pair_sum(2);
    const double lo = std::min({s0, s1, s2});
    const double hi = std::max({s0, s1, s2});
    return hi - lo;
}

double BeamConfig::time_phase(double t) const {
    return angular_frequency() * t + 0.5 * pair_sum(0);
}

double BeamConfig::time_phase_offset() const {
    return 0.5 * pair_sum(0) / angular_frequency();
}

double BeamConfig::x_offset() const { return 0.5 * (phases[5] - phases[0]) / wavenumber(); }
double BeamConfig::y_offset() const { return 0.5 * (phases[4] - phases[1]) / wavenumber(); }
double BeamConfig::z_offset() const { return 0.5 * (phases[2] - phases[3]) / wavenumber(); }

BeamConfig BeamConfig::from_geometry(double d1, double d2, double wavelength,
                                     double common_phase) {
    if (!(wavelength > 0.0)) throw ConfigError("from_geometry: wavelength must be positive");
    BeamConfig cfg;
    cfg.wavelength = wavelength;
    cfg.d1 = d1;
    cfg.d2 = d2;
    const double k = cfg.wavenumber();
    cfg.phases[0] = common_phase - k * (d1 + d2);  // phi1
    cfg.phases[5] = common_phase + k * (d1 + d2);  // phi6
    cfg.phases[1] = common_phase - k * d2;         // phi2
    cfg.phases[4] = common_phase + k * d2;         // phi5
    cfg.phases[2] = common_phase;                  // phi3
    cfg.phases[3] = common_phase;                  // phi4
    return cfg;
}

BeamConfig BeamConfig::checked(const std::array<double, 6>& phases, double d1, double d2,
                               double wavelength, double tol) {
    if (!(wavelength > 0.0)) throw ConfigError("BeamConfig: wavelength must be positive");
    for (double p : phases) {
        if (!std::isfinite(p)) throw ConfigError("BeamConfig: phases must be finite");
    }
    BeamConfig cfg{phases, d1, d2, wavelength, tol};
    if (!cfg.phase_stabilized()) {
        throw ConfigError("BeamConfig: pairwise phase sums differ by " +
                          std::to_string(cfg.phase_mismatch()) + " rad (tolerance " +
                          std::to_string(tol) + ")");
    }
    return cfg;
}

FieldVector beam_field(int index, const Point3& r, double t, const BeamConfig& cfg) {
    if (index < 1 || index > 6) {
        throw std::invalid_argument("beam_field: index must be in 1..6");
    }
    const double k = cfg.wavenumber();
    const double wt = cfg.angular_frequency() * t;
    const double ph = cfg.phases[static_cast<std::size_t>(index - 1)];
    switch (index) {
        case 1: {
            const double a = wt - k * r.x + ph;
            return {0.0, std::cos(a), std::sin(a)};
        }
        case 2: {
            const double a = wt - k * r.y + ph;
            return {std::sin(a), 0.0, std::cos(a)};
        }
        case 3: {
            const double a = wt + k * r.z + ph;
            return {std::cos(a), std::sin(a), 0.0};
        }
        case 4: {
            const double a = wt - k * r.z + ph;
            return {std::cos(a), -std::sin(a), 0.0};
        }
        case 5: {
            const double a = wt + k * r.y + ph;
            return {-std::sin(a), 0.0, std::cos(a)};
        }
        default: {  // 6
            const double a = wt + k * r.x + ph;
            return {0.0, std::cos(a), -std::sin(a)};
        }
    }
}

FieldVector total_field(const Point3& r, double t, const BeamConfig& cfg) {
    FieldVector sum;
    for (int i = 1; i <= 6; ++i) sum = sum + beam_field(i, r, t, cfg);
    return sum;
}

namespace {

// Envelope expansion without the phase-constraint check; shared by the
// checked entry point and by verify_factorization, which must be able to
// report the residual of a violating configuration.
FieldVector envelope_unchecked(const Point3& r, const BeamConfig& cfg) {
    const double k = cfg.wavenumber();
    const double ax = k * r.x + 0.5 * (cfg.phases[5] - cfg.phases[0]);  // k X
    const double ay = k * r.y + 0.5 * (cfg.phases[4] - cfg.phases[1]);  // k Y
    const double az = k * r.z + 0.5 * (cfg.phases[2] - cfg.phases[3]);  // k Z
    return {std::cos(az) - std::sin(ay),
            std::cos(ax) + std::sin(az),
            std::cos(ay) - std::sin(ax)};
}

}  // namespace

FieldVector envelope(const Point3& r, const BeamConfig& cfg) {
    if (!cfg.phase_stabilized()) {
        throw ConfigError("envelope: pairwise phase sums differ by " +
                          std::to_string(cfg.phase_mismatch()) +
                          " rad; the time phase does not factor out");
    }
    return envelope_unchecked(r, cfg);
}

double intensity(const Point3& r, const BeamConfig& cfg) {
    if (!cfg.phase_stabilized()) {
        throw ConfigError("intensity: phase constraint violated");
    }
    return envelope_unchecked(r, cfg).squared_norm();
}

double intensity_closed_form(const Point3& r, const BeamConfig& cfg) {
    const double k = cfg.wavenumber();
    const double ax = k * r.x + 0.5 * (cfg.phases[5] - cfg.phases[0]);
    const double ay = k * r.y + 0.5 * (cfg.phases[4] - cfg.phases[1]);
    const double az = k * r.z + 0.5 * (cfg.phases[2] - cfg.phases[3]);
    return 3.0 - 2.0 * std::sin(ay) * std::cos(az) + 2.0 * std::sin(ax) * std::sin(az) +
           2.0 * std::cos(ax) * std::cos(ay);
}

double verify_factorization(const BeamConfig& cfg, std::span<const Point3> points,
                            std::span<const double> times) {
    if (points.empty() || times.empty()) {
        throw std::invalid_argument("verify_factorization: empty sample set");
    }
    double worst = 0.0;
    for (const Point3& r : points) {
        const FieldVector env = envelope_unchecked(r, cfg);
        for (double t : times) {
            const FieldVector direct = total_field(r, t, cfg);
            const FieldVector factored = 2.0 * std::cos(cfg.time_phase(t)) * env;
            worst = std::max(worst, (direct - factored).norm());
        }
    }
    return worst;
}

namespace {

struct IntensityField {
    // Intensity and gradient in dimensionless u = k*r coordinates.
    double ox, oy, oz;  // phase-derived offsets, u units

    explicit IntensityField(const BeamConfig& cfg) {
        ox = 0.5 * (cfg.phases[5] - cfg.phases[0]);
        oy = 0.5 * (cfg.phases[4] - cfg.phases[1]);
        oz = 0.5 * (cfg.phases[2] - cfg.phases[3]);
    }

    double value(const Eigen::Vector3d& u) const {
        const double ax = u.x() + ox, ay = u.y() + oy, az = u.z() + oz;
        return 3.0 - 2.0 * std::sin(ay) * std::cos(az) + 2.0 * std::cos(ax) * std::sin(az) -
               2.0 * std::sin(ax) * std::cos(ay);
    }

    Eigen::Vector3d gradient(const Eigen::Vector3d& u) const {
        const double ax = u.x() + ox, ay = u.y() + oy, az = u.z() + oz;
        return {-2.0 * std::sin(ax) * std::sin(az) - 2.0 * std::cos(ax) * std::cos(ay),
                -2.0 * std::cos(ay) * std::cos(az) + 2.0 * std::sin(ax) * std::sin(ay),
                2.0 * std::sin(ay) * std::sin(az) + 2.0 * std::cos(ax) * std::cos(az)};
    }
};

// Gradient ascent on the intensity with step halving; refines u in place and
// reports whether the gradient norm dropped below tolerance.
bool ascend_to_maximum(const IntensityField& field, Eigen::Vector3d& u, double grad_tol,
                       int max_iter) {
    double step = 0.5;
    for (int it = 0; it < max_iter; ++it) {
        const Eigen::Vector3d g = field.gradient(u);
        if (g.norm() / 6.0 < grad_tol) return true;
        const double f0 = field.value(u);
        bool moved = false;
        while (step > 1e-17) {
            const Eigen::Vector3d trial = u + step * g;
            if (field.value(trial) > f0) {
                u = trial;
                step = std::min(step * 1.5, 1.0);
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) return field.gradient(u).norm() / 6.0 < grad_tol * 10.0;
    }
    return false;
}

Eigen::Matrix3d numeric_hessian(const IntensityField& field, const Eigen::Vector3d& u,
                                double h) {
    Eigen::Matrix3d hess;
    for (int i = 0; i < 3; ++i) {
        Eigen::Vector3d ei = Eigen::Vector3d::Zero();
        ei[i] = h;
        hess(i, i) = (field.value(u + ei) - 2.0 * field.value(u) + field.value(u - ei)) / (h * h);
        for (int j = i + 1; j < 3; ++j) {
            Eigen::Vector3d ej = Eigen::Vector3d::Zero();
            ej[j] = h;
            const double v = (field.value(u + ei + ej) - field.value(u + ei - ej) -
                              field.value(u - ei + ej) + field.value(u - ei - ej)) /
                             (4.0 * h * h);
            hess(i, j) = v;
            hess(j, i) = v;
        }
    }
    return hess;
}

}  // namespace

double peak_intensity(const BeamConfig& cfg) {
    const IntensityField field(cfg);
    const int n = 64;
    const double h = two_pi / n;
    double best = -1.0;
    Eigen::Vector3d best_u = Eigen::Vector3d::Zero();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                const Eigen::Vector3d u(i * h, j * h, k * h);
                const double v = field.value(u);
                if (v > best) {
                    best = v;
                    best_u = u;
                }
            }
        }
    }
    Eigen::Vector3d u = best_u;
    if (ascend_to_maximum(field, u, 1e-12, 20000)) {
        best = std::max(best, field.value(u));
    }
    return best;
}

const PotentialSample& PotentialGrid::at(int i, int j, int k) const {
    const std::size_t idx = (static_cast<std::size_t>(i) * shape[1] + j) * shape[2] + k;
    return samples[idx];
}

PotentialGrid potential_grid(const BeamConfig& cfg, const Box& cell, int resolution,
                             double depth_scale) {
    if (resolution < 2) throw std::invalid_argument("potential_grid: resolution must be >= 2");
    if (!(depth_scale > 0.0)) throw std::invalid_argument("potential_grid: depth scale must be positive");
    const double sx = cell.hi.x - cell.lo.x;
    const double sy = cell.hi.y - cell.lo.y;
    const double sz = cell.hi.z - cell.lo.z;
    if (!(sx > 0.0) || !(sy > 0.0) || !(sz > 0.0)) {
        throw std::invalid_argument("potential_grid: degenerate cell");
    }

    PotentialGrid grid;
    grid.shape = {resolution, resolution, resolution};
    grid.cell = cell;
    grid.depth_scale = depth_scale;
    grid.peak_intensity = peak_intensity(cfg);
    grid.samples.reserve(static_cast<std::size_t>(resolution) * resolution * resolution);

    for (int i = 0; i < resolution; ++i) {
        const double x = cell.lo.x + sx * i / (resolution - 1);
        for (int j = 0; j < resolution; ++j) {
            const double y = cell.lo.y + sy * j / (resolution - 1);
            for (int k = 0; k < resolution; ++k) {
                const double z = cell.lo.z + sz * k / (resolution - 1);
                const Point3 p{x, y, z};
                const double inten = intensity(p, cfg);
                const double pot =
                    std::clamp(-depth_scale * inten / grid.peak_intensity, -depth_scale, 0.0);
                grid.samples.push_back({p, inten, pot});
            }
        }
    }
    return grid;
}

std::vector<Point3> find_minima(const BeamConfig& cfg, const Box& cell,
                                const MinimaOptions& opts) {
    const double lambda = cfg.wavelength;
    const double sx = cell.hi.x - cell.lo.x;
    const double sy = cell.hi.y - cell.lo.y;
    const double sz = cell.hi.z - cell.lo.z;
    if (sx < lambda * (1.0 - 1e-12) || sy < lambda * (1.0 - 1e-12) ||
        sz < lambda * (1.0 - 1e-12)) {
        throw ConfigError("find_minima: cell must span at least one wavelength per axis");
    }
    const IntensityField field(cfg);
    const double k = cfg.wavenumber();
    const Eigen::Vector3d lo(k * cell.lo.x, k * cell.lo.y, k * cell.lo.z);
    const Eigen::Vector3d span(k * sx, k * sy, k * sz);

    // A wrapped neighbor comparison is only meaningful when the cell tiles the
    // lattice, i.e. spans an integer number of periods along that axis.
    const int n = opts.coarse_resolution;
    std::array<bool, 3> wraps{};
    for (int a = 0; a < 3; ++a) {
        const double periods = span[a] / two_pi;
        wraps[a] = std::abs(periods - std::round(periods)) < 1e-9;
    }

    std::vector<double> values(static_cast<std::size_t>(n) * n * n);
    auto idx = [n](int i, int j, int l) {
        return (static_cast<std::size_t>(i) * n + j) * n + l;
    };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int l = 0; l < n; ++l) {
                const Eigen::Vector3d u =
                    lo + Eigen::Vector3d(span[0] * i / n, span[1] * j / n, span[2] * l / n);
                values[idx(i, j, l)] = field.value(u);
            }
        }
    }

    // Seeds: strict local maxima of the intensity against the 6 axis neighbors.
    std::vector<Eigen::Vector3d> seeds;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int l = 0; l < n; ++l) {
                const double v = values[idx(i, j, l)];
                bool is_max = true;
                for (int a = 0; a < 3 && is_max; ++a) {
                    for (int dir = -1; dir <= 1 && is_max; dir += 2) {
                        int ni = i, nj = j, nl = l;
                        int& c = (a == 0) ? ni : (a == 1) ? nj : nl;
                        c += dir;
                        if (c < 0 || c >= n) {
                            if (!wraps[a]) {
                                is_max = false;  // cannot certify across an open edge
                                continue;
                            }
                            c = (c + n) % n;
                        }
                        if (values[idx(ni, nj, nl)] >= v) is_max = false;
                    }
                }
                if (is_max) {
                    seeds.push_back(lo + Eigen::Vector3d(span[0] * i / n, span[1] * j / n,
                                                         span[2] * l / n));
                }
            }
        }
    }

    std::vector<Eigen::Vector3d> found;
    for (Eigen::Vector3d u : seeds) {
        if (!ascend_to_maximum(field, u, opts.gradient_tolerance, opts.max_iterations)) continue;
        // Keep true maxima only; degenerate saddle lines also have small gradients.
        const Eigen::Matrix3d hess = numeric_hessian(field, u, 1e-4 * two_pi);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(hess);
        if (es.eigenvalues().maxCoeff() > -1e-4) continue;
        found.push_back(u);
    }

    // Fold into the first period of the cell and deduplicate.
    const double tol_u = opts.dedup_tolerance * two_pi;
    std::vector<Eigen::Vector3d> unique;
    for (const Eigen::Vector3d& u : found) {
        Eigen::Vector3d f;
        for (int a = 0; a < 3; ++a) {
            double rel = std::fmod(u[a] - lo[a], two_pi);
            if (rel < 0) rel += two_pi;
            if (two_pi - rel < tol_u) rel = 0.0;  // snap wrap-around duplicates
            f[a] = lo[a] + rel;
        }
        bool duplicate = false;
        for (const Eigen::Vector3d& g : unique) {
            Eigen::Vector3d d = f - g;
            for (int a = 0; a < 3; ++a) {
                d[a] = std::remainder(d[a], two_pi);
            }
            if (d.norm() < tol_u) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) unique.push_back(f);
    }

    std::sort(unique.begin(), unique.end(), [](const auto& a, const auto& b) {
        if (a.z() != b.z()) return a.z() < b.z();
        if (a.y() != b.y()) return a.y() < b.y();
        return a.x() < b.x();
    });

    std::vector<Point3> result;
    result.reserve(unique.size());
    for (const auto& u : unique) {
        result.push_back({u.x() / k, u.y() / k, u.z() / k});
    }
    if (result.empty()) {
        throw NumericError("find_minima: no potential minima located in the cell");
    }
    return result;
}

WellCharacterization characterize_well(const BeamConfig& cfg, const Point3& minimum,
                                       double depth_scale_joule, double mass_kg) {
    if (!(mass_kg > 0.0)) throw std::invalid_argument("characterize_well: mass must be positive");
    if (!(depth_scale_joule > 0.0)) {
        throw std::invalid_argument("characterize_well: depth scale must be positive");
    }
    const double peak = peak_intensity(cfg);
    const double h = cfg.wavelength / 1000.0;

    auto potential = [&](double x, double y, double z) {
        return -depth_scale_joule * intensity({x, y, z}, cfg) / peak;
    };

    Eigen::Matrix3d hess;
    const std::array<double, 3> c{minimum.x, minimum.y, minimum.z};
    auto shifted = [&](int axis, double d, std::array<double, 3> p) {
        p[static_cast<std::size_t>(axis)] += d;
        return p;
    };
    auto eval = [&](const std::array<double, 3>& p) { return potential(p[0], p[1], p[2]); };

    const double v0 = eval(c);
    for (int i = 0; i < 3; ++i) {
        hess(i, i) = (eval(shifted(i, h, c)) - 2.0 * v0 + eval(shifted(i, -h, c))) / (h * h);
        for (int j = i + 1; j < 3; ++j) {
            const double v = (eval(shifted(j, h, shifted(i, h, c))) -
                              eval(shifted(j, -h, shifted(i, h, c))) -
                              eval(shifted(j, h, shifted(i, -h, c))) +
                              eval(shifted(j, -h, shifted(i, -h, c)))) /
                             (4.0 * h * h);
            hess(i, j) = v;
            hess(j, i) = v;
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(hess);
    if (es.info() != Eigen::Success) {
        throw NumericError("characterize_well: eigen-decomposition failed");
    }

    WellCharacterization well;
    well.minimum = minimum;
    well.mass_kg = mass_kg;
    for (int i = 0; i < 3; ++i) {
        const double eig = es.eigenvalues()[i];
        if (eig <= 0.0) {
            throw NumericError("characterize_well: Hessian not positive definite; "
                               "the supplied point is not a potential minimum");
        }
        well.hessian_eigenvalues[static_cast<std::size_t>(i)] = eig;
        well.frequencies_hz[static_cast<std::size_t>(i)] =
            std::sqrt(eig / mass_kg) / two_pi;
    }
    return well;
}

}  // namespace latline::lattice
