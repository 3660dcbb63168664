#pragma once

// File formats and run bookkeeping: spectrum/table CSV, key-value or JSON
// configuration files, the per-run manifest, and static SVG plots. All float
// formatting is shortest-round-trip and locale independent, so identical
// inputs produce byte-identical outputs.

#include <json.hpp>
#include <filesystem>
#include <string>
#include <vector>

#include "latline/spectrum_fit.hpp"

namespace latline::io {

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

// --- spectra ---------------------------------------------------------------

// CSV with header `detuning_khz,counts[,sigma]`. Rejects non-monotone grids,
// NaN rows and malformed numbers with row-numbered diagnostics.
specfit::Spectrum load_spectrum(const std::filesystem::path& path);

void save_spectrum(const specfit::Spectrum& spec, const std::filesystem::path& path);

// --- generic tables ----------------------------------------------------------

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

void save_table(const Table& table, const std::filesystem::path& path,
                const std::vector<std::string>& trailing_comments = {});

// --- configuration -----------------------------------------------------------

// Accepts either JSON or a flat TOML-style `key = value` file (numbers,
// strings, booleans, [a, b, c] arrays, and [section] headers). Returns a JSON
// object either way.
nlohmann::json load_config(const std::filesystem::path& path);

// Typed getters with config-error diagnostics naming the key.
double config_number(const nlohmann::json& cfg, const std::string& key, double fallback);
double require_number(const nlohmann::json& cfg, const std::string& key);
bool config_flag(const nlohmann::json& cfg, const std::string& key, bool fallback);

// --- run manifest ------------------------------------------------------------

struct RunManifest {
    std::string tool = "latline";
    std::string version;
    std::string subcommand;
    std::vector<std::string> argv;
    nlohmann::json config;  // fully resolved settings for the run
    std::vector<std::pair<std::string, std::string>> inputs;   // path, checksum
    std::vector<std::pair<std::string, std::string>> outputs;  // path, checksum
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;

    void add_input(const std::filesystem::path& path);
    void add_output(const std::filesystem::path& path);
    void write(const std::filesystem::path& path) const;
};

// FNV-1a 64-bit checksum of a file's bytes, as fixed-width hex.
std::string file_checksum(const std::filesystem::path& path);

// --- plotting ----------------------------------------------------------------

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false;  // draw points instead of a polyline
};

struct PlotStyle {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 800;
    int height = 520;
};

// Self-contained SVG with axes, tick labels and a legend; deterministic bytes
// for identical input.
void emit_plot(const std::vector<PlotSeries>& series, const PlotStyle& style,
               const std::filesystem::path& path);

}  // namespace latline::io
