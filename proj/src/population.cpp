#include "latline/population.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

#include "latline/constants.hpp"
#include "latline/errors.hpp"

namespace latline::population {

double TemperatureModel::evaluate_uK(double nu_osc_khz) const {
    return a0_uK + a1_uK_per_khz * nu_osc_khz + a2_uK_per_khz2 * nu_osc_khz * nu_osc_khz;
}

TemperatureModel default_temperature_model() {
    // Anchored at T = 3 uK and 6 uK with a slight sag below the proportional
    // line in between; along an exactly proportional T(nu) the Boltzmann ratio
    // would be constant at 0.84.
    TemperatureModel model;
    model.a0_uK = 0.240;
    model.a1_uK_per_khz = 0.0486842;
    model.a2_uK_per_khz2 = 4.081e-5;
    model.nu_min_khz = 54.227;
    model.nu_max_khz = 108.454;
    model.out_of_range = TemperatureModel::RangePolicy::reject;
    return model;
}

double temperature_uK(double nu_osc_khz, const TemperatureModel& model) {
    if (nu_osc_khz < model.nu_min_khz || nu_osc_khz > model.nu_max_khz) {
        switch (model.out_of_range) {
            case TemperatureModel::RangePolicy::reject:
                throw ConfigError("temperature: nu_osc " + std::to_string(nu_osc_khz) +
                                  " kHz outside the model range [" +
                                  std::to_string(model.nu_min_khz) + ", " +
                                  std::to_string(model.nu_max_khz) + "]");
            case TemperatureModel::RangePolicy::warn:
                std::cerr << "warning: nu_osc " << nu_osc_khz
                          << " kHz outside the temperature-model range; extrapolating\n";
                break;
            case TemperatureModel::RangePolicy::clamp:
                nu_osc_khz = std::clamp(nu_osc_khz, model.nu_min_khz, model.nu_max_khz);
                break;
        }
    }
    const double t = model.evaluate_uK(nu_osc_khz);
    if (!(t > 0.0)) {
        throw NumericError("temperature: model yields non-positive temperature");
    }
    return t;
}

double population_ratio(double nu_osc_hz, double temperature_K) {
    if (!(nu_osc_hz > 0.0)) {
        throw std::invalid_argument("population_ratio: nu_osc must be positive");
    }
    if (!(temperature_K > 0.0)) {
        throw std::invalid_argument("population_ratio: temperature must be positive");
    }
    return 2.0 * std::exp(-planck_h * nu_osc_hz / (boltzmann_kb * temperature_K));
}

PopulationWeights composite_weights(double ratio, double s_ratio) {
    if (!(ratio > 0.0)) {
        throw std::invalid_argument("composite_weights: population ratio must be positive");
    }
    if (!(s_ratio > 0.0)) {
        throw std::invalid_argument("composite_weights: cross-section ratio must be positive");
    }
    PopulationWeights w;
    w.ratio = ratio;
    w.s_ratio = s_ratio;
    const double rs = ratio * s_ratio;
    w.weight_g = 1.0 / (1.0 + rs);
    w.weight_e = rs / (1.0 + rs);
    return w;
}

PopulationWeights weights_at(double nu_osc_hz, const TemperatureModel& model, double s_ratio) {
    const double t_uK = temperature_uK(nu_osc_hz / 1000.0, model);
    const double ratio = population_ratio(nu_osc_hz, t_uK * 1e-6);
    return composite_weights(ratio, s_ratio);
}

}  // namespace latline::population
