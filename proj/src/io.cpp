#include "latline/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "latline/errors.hpp"

namespace latline::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

double parse_number(const std::string& field, std::size_t row) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end != begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r')) --end;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw DataError("malformed number '" + field + "' (row " + std::to_string(row) + ")");
    }
    return value;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

std::string strip(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

specfit::Spectrum load_spectrum(const fs::path& path) {
    std::istringstream in(read_file(path));
    specfit::Spectrum spec;
    spec.label = path.stem().string();

    std::string line;
    std::size_t row = 0;
    bool header_seen = false;
    bool has_sigma = false;
    while (std::getline(in, line)) {
        ++row;
        const std::string body = strip(line);
        if (body.empty() || body[0] == '#') {
            // Metadata comments: "# key = value".
            const auto eq = body.find('=');
            if (eq != std::string::npos) {
                const std::string key = strip(body.substr(1, eq - 1));
                if (key == "nu_osc_khz") {
                    try {
                        spec.nu_osc_khz = parse_number(body.substr(eq + 1), row);
                    } catch (const DataError&) {
                        // tolerated: plain comment that merely looks like metadata
                    }
                }
            }
            continue;
        }
        if (!header_seen) {
            const auto cols = split(body, ',');
            if (cols.size() < 2 || strip(cols[0]) != "detuning_khz" ||
                strip(cols[1]) != "counts") {
                throw DataError("'" + path.string() +
                                "': expected header detuning_khz,counts[,sigma] (row " +
                                std::to_string(row) + ")");
            }
            if (cols.size() == 3 && strip(cols[2]) == "sigma") {
                has_sigma = true;
            } else if (cols.size() > 2) {
                throw DataError("'" + path.string() + "': unexpected extra columns (row " +
                                std::to_string(row) + ")");
            }
            header_seen = true;
            continue;
        }
        const auto fields = split(body, ',');
        const std::size_t expected = has_sigma ? 3 : 2;
        if (fields.size() != expected) {
            throw DataError("'" + path.string() + "': expected " + std::to_string(expected) +
                            " fields (row " + std::to_string(row) + ")");
        }
        const double detuning = parse_number(fields[0], row);
        const double counts = parse_number(fields[1], row);
        const std::string at_row = " (row " + std::to_string(row) + ")";
        if (!std::isfinite(detuning) || !std::isfinite(counts)) {
            throw DataError("'" + path.string() + "': non-finite value" + at_row);
        }
        if (!spec.detuning_khz.empty() && !(detuning > spec.detuning_khz.back())) {
            throw DataError("'" + path.string() +
                            "': detuning grid not strictly increasing" + at_row);
        }
        spec.detuning_khz.push_back(detuning);
        spec.counts.push_back(counts);
        if (has_sigma) {
            const double sig = parse_number(fields[2], row);
            if (!std::isfinite(sig) || !(sig > 0.0)) {
                throw DataError("'" + path.string() + "': non-positive uncertainty" + at_row);
            }
            spec.sigma.push_back(sig);
        }
    }
    if (!header_seen) throw DataError("'" + path.string() + "': empty file");
    try {
        specfit::validate_spectrum(spec);
    } catch (const DataError& err) {
        throw DataError("'" + path.string() + "': " + err.what());
    }
    return spec;
}

void save_spectrum(const specfit::Spectrum& spec, const fs::path& path) {
    std::string out;
    const bool has_sigma = !spec.sigma.empty();
    if (spec.nu_osc_khz > 0.0) {
        out += "# nu_osc_khz = " + format_double(spec.nu_osc_khz) + "\n";
    }
    out += has_sigma ? "detuning_khz,counts,sigma\n" : "detuning_khz,counts\n";
    for (std::size_t i = 0; i < spec.size(); ++i) {
        out += format_double(spec.detuning_khz[i]);
        out += ',';
        out += format_double(spec.counts[i]);
        if (has_sigma) {
            out += ',';
            out += format_double(spec.sigma[i]);
        }
        out += '\n';
    }
    write_file(path, out);
}

void save_table(const Table& table, const fs::path& path,
                const std::vector<std::string>& trailing_comments) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out += ',';
        out += table.columns[c];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size()) {
            throw DataError("save_table: row width differs from header");
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    for (const auto& comment : trailing_comments) {
        out += "# " + comment + "\n";
    }
    write_file(path, out);
}

namespace {

nlohmann::json parse_flat_value(const std::string& raw, std::size_t row) {
    const std::string v = strip(raw);
    if (v.empty()) throw ConfigError("empty value (line " + std::to_string(row) + ")");
    if (v == "true") return true;
    if (v == "false") return false;
    if (v.front() == '"' && v.back() == '"' && v.size() >= 2) {
        return v.substr(1, v.size() - 2);
    }
    if (v.front() == '[') {
        if (v.back() != ']') {
            throw ConfigError("unterminated array (line " + std::to_string(row) + ")");
        }
        nlohmann::json arr = nlohmann::json::array();
        const std::string inner = strip(v.substr(1, v.size() - 2));
        if (inner.empty()) return arr;
        for (const auto& item : split(inner, ',')) {
            arr.push_back(parse_flat_value(item, row));
        }
        return arr;
    }
    double num = 0.0;
    const std::string t = strip(v);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), num);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
        throw ConfigError("cannot parse value '" + v + "' (line " + std::to_string(row) + ")");
    }
    return num;
}

}  // namespace

nlohmann::json load_config(const fs::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const DataError& err) {
        throw ConfigError(err.what());
    }
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return nlohmann::json::object();
    if (text[first] == '{') {
        try {
            return nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& err) {
            throw ConfigError("'" + path.string() + "': " + err.what());
        }
    }

    // Flat key = value format with optional [section] headers.
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* scope = &root;
    std::istringstream in(text);
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        const std::string body = strip(line);
        if (body.empty() || body[0] == '#') continue;
        if (body.front() == '[') {
            if (body.back() != ']') {
                throw ConfigError("'" + path.string() + "': malformed section (line " +
                                  std::to_string(row) + ")");
            }
            const std::string section = strip(body.substr(1, body.size() - 2));
            if (section.empty()) {
                throw ConfigError("'" + path.string() + "': empty section name (line " +
                                  std::to_string(row) + ")");
            }
            scope = &root[section];
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("'" + path.string() + "': expected key = value (line " +
                              std::to_string(row) + ")");
        }
        const std::string key = strip(body.substr(0, eq));
        if (key.empty()) {
            throw ConfigError("'" + path.string() + "': empty key (line " + std::to_string(row) +
                              ")");
        }
        try {
            (*scope)[key] = parse_flat_value(body.substr(eq + 1), row);
        } catch (const ConfigError& err) {
            throw ConfigError("'" + path.string() + "': " + err.what());
        }
    }
    return root;
}

double config_number(const nlohmann::json& cfg, const std::string& key, double fallback) {
    if (!cfg.contains(key)) return fallback;
    if (!cfg.at(key).is_number()) {
        throw ConfigError("config key '" + key + "' must be a number");
    }
    return cfg.at(key).get<double>();
}

double require_number(const nlohmann::json& cfg, const std::string& key) {
    if (!cfg.contains(key)) throw ConfigError("missing required config key '" + key + "'");
    if (!cfg.at(key).is_number()) {
        throw ConfigError("config key '" + key + "' must be a number");
    }
    return cfg.at(key).get<double>();
}

bool config_flag(const nlohmann::json& cfg, const std::string& key, bool fallback) {
    if (!cfg.contains(key)) return fallback;
    const auto& v = cfg.at(key);
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number()) return v.get<double>() != 0.0;
    throw ConfigError("config key '" + key + "' must be a boolean");
}

std::string file_checksum(const fs::path& path) {
    const std::string data = read_file(path);
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return std::string("fnv1a64:") + buf;
}

void RunManifest::add_input(const fs::path& path) {
    inputs.emplace_back(path.string(), file_checksum(path));
}

void RunManifest::add_output(const fs::path& path) {
    outputs.emplace_back(path.string(), file_checksum(path));
}

void RunManifest::write(const fs::path& path) const {
    nlohmann::json j;
    j["tool"] = tool;
    j["version"] = version;
    j["subcommand"] = subcommand;
    j["argv"] = argv;
    j["config"] = config;
    j["seed"] = seed;
    j["wall_seconds"] = wall_seconds;
    auto listing = [](const std::vector<std::pair<std::string, std::string>>& files) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [p, sum] : files) {
            arr.push_back({{"path", p}, {"checksum", sum}});
        }
        return arr;
    };
    j["inputs"] = listing(inputs);
    j["outputs"] = listing(outputs);
    write_file(path, j.dump(2) + "\n");
}

namespace {

struct AxisTicks {
    std::vector<double> values;
    double lo, hi;
};

AxisTicks nice_ticks(double lo, double hi) {
    if (!(hi > lo)) {
        hi = lo + 1.0;
        lo -= 1.0;
    }
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * m >= raw) {
            step = mag * m;
            break;
        }
    }
    AxisTicks ticks;
    ticks.lo = std::floor(lo / step) * step;
    ticks.hi = std::ceil(hi / step) * step;
    for (double v = ticks.lo; v <= ticks.hi + 0.5 * step; v += step) {
        ticks.values.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    }
    return ticks;
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

}  // namespace

void emit_plot(const std::vector<PlotSeries>& series, const PlotStyle& style,
               const fs::path& path) {
    if (series.empty()) throw std::invalid_argument("emit_plot: no series");

    double x_lo = std::numeric_limits<double>::infinity();
    double x_hi = -x_lo, y_lo = x_lo, y_hi = -x_lo;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw DataError("emit_plot: series size mismatch");
        for (double v : s.x) {
            x_lo = std::min(x_lo, v);
            x_hi = std::max(x_hi, v);
        }
        for (double v : s.y) {
            y_lo = std::min(y_lo, v);
            y_hi = std::max(y_hi, v);
        }
    }
    if (!std::isfinite(x_lo) || !std::isfinite(y_lo)) {
        throw DataError("emit_plot: series contain no finite points");
    }

    const AxisTicks xt = nice_ticks(x_lo, x_hi);
    const AxisTicks yt = nice_ticks(y_lo, y_hi);
    const double ml = 70, mr = 20, mt = style.title.empty() ? 20 : 44, mb = 52;
    const double pw = style.width - ml - mr;
    const double ph = style.height - mt - mb;
    auto px = [&](double v) { return ml + (v - xt.lo) / (xt.hi - xt.lo) * pw; };
    auto py = [&](double v) { return mt + ph - (v - yt.lo) / (yt.hi - yt.lo) * ph; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(style.width) +
           "\" height=\"" + std::to_string(style.height) + "\" viewBox=\"0 0 " +
           std::to_string(style.width) + " " + std::to_string(style.height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!style.title.empty()) {
        svg += "<text x=\"" + fixed2(ml + pw / 2) +
               "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
               style.title + "</text>\n";
    }

    // Grid and ticks.
    for (double v : xt.values) {
        const std::string x = fixed2(px(v));
        svg += "<line x1=\"" + x + "\" y1=\"" + fixed2(mt) + "\" x2=\"" + x + "\" y2=\"" +
               fixed2(mt + ph) + "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + x + "\" y=\"" + fixed2(mt + ph + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               tick_label(v) + "</text>\n";
    }
    for (double v : yt.values) {
        const std::string y = fixed2(py(v));
        svg += "<line x1=\"" + fixed2(ml) + "\" y1=\"" + y + "\" x2=\"" + fixed2(ml + pw) +
               "\" y2=\"" + y + "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + fixed2(ml - 6) + "\" y=\"" + y +
               "\" text-anchor=\"end\" dominant-baseline=\"middle\" "
               "font-family=\"sans-serif\" font-size=\"11\">" +
               tick_label(v) + "</text>\n";
    }
    svg += "<rect x=\"" + fixed2(ml) + "\" y=\"" + fixed2(mt) + "\" width=\"" + fixed2(pw) +
           "\" height=\"" + fixed2(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";

    // Axis labels.
    svg += "<text x=\"" + fixed2(ml + pw / 2) + "\" y=\"" + fixed2(style.height - 12.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
           style.x_label + "</text>\n";
    svg += "<text x=\"16\" y=\"" + fixed2(mt + ph / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 16 " +
           fixed2(mt + ph / 2) + ")\">" + style.y_label + "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % std::size(kPalette)];
        if (s.markers) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                svg += "<circle cx=\"" + fixed2(px(s.x[i])) + "\" cy=\"" + fixed2(py(s.y[i])) +
                       "\" r=\"2.5\" fill=\"" + std::string(color) + "\"/>\n";
            }
        } else {
            std::string points;
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                points += fixed2(px(s.x[i])) + "," + fixed2(py(s.y[i])) + " ";
            }
            svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                   "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
        }
        // Legend entry.
        const double ly = mt + 16 + 18 * static_cast<double>(si);
        svg += "<rect x=\"" + fixed2(ml + pw - 150) + "\" y=\"" + fixed2(ly - 9) +
               "\" width=\"12\" height=\"12\" fill=\"" + std::string(color) + "\"/>\n";
        svg += "<text x=\"" + fixed2(ml + pw - 132) + "\" y=\"" + fixed2(ly + 1) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + s.name + "</text>\n";
    }
    svg += "</svg>\n";
    write_file(path, svg);
}

}  // namespace latline::io
