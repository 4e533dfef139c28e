#pragma once

// Run configuration: flat "key = value" text, defaults from the standard
// simulation parameter table.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "rischarge/brt.hpp"
#include "rischarge/error.hpp"
#include "rischarge/power.hpp"

namespace rischarge::config {

enum class GridScale { Linear, Log };

struct GridSpec {
    double min = 1e-3;
    double max = 10.0;
    int points = 200;
    GridScale scale = GridScale::Log;

    void validate() const {
        if (!(min < max)) throw ConfigError("grid: grid_min must be < grid_max");
        if (points < 2) throw ConfigError("grid: grid_points must be >= 2");
        if (scale == GridScale::Log && !(min > 0.0)) throw ConfigError("grid: log grid needs grid_min > 0");
    }

    std::vector<double> values() const {
        validate();
        std::vector<double> v(points);
        for (int i = 0; i < points; ++i) {
            const double t = static_cast<double>(i) / (points - 1);
            v[i] = scale == GridScale::Linear ? min + t * (max - min)
                                              : std::exp(std::log(min) + t * (std::log(max) - std::log(min)));
        }
        v.front() = min;
        v.back() = max;
        return v;
    }

    bool operator==(const GridSpec&) const = default;
};

struct RunConfig {
    // link
    double ps_dbm = 15.0;
    int n = 4;
    double d_tot = 5.0;
    double d1_frac = 0.5;
    double d2_frac = 0.5;
    double delta = 2.7;
    // battery
    double cb_mah = 10.0;
    double dd = 0.4;
    double vb = 1.2;
    double eta = 0.5;
    // simulation and output
    std::uint64_t trials = 1000000;
    std::uint64_t seed = 20240601;
    GridSpec grid{};
    int precision = 9;
    std::string out = "out.csv";

    power::ScenarioConfig scenario() const {
        power::ScenarioConfig s;
        s.ps_watts = power::dbm_to_watts(ps_dbm);
        s.d1 = d1_frac * d_tot;
        s.d2 = d2_frac * d_tot;
        s.delta = delta;
        s.channel.n_elements = n;
        return s;
    }

    brt::BatteryProfile battery() const { return {cb_mah * 1e-3, dd, vb, eta}; }

    void validate() const {
        if (precision < 6 || precision > 17) throw ConfigError("precision must be in [6, 17]");
        if (trials < 1) throw ConfigError("trials must be >= 1");
        if (!std::isfinite(ps_dbm)) throw ConfigError("ps_dbm must be finite");
        if (!(d_tot > 0.0) || !(d1_frac > 0.0) || !(d2_frac > 0.0)) throw ConfigError("distances must be positive");
        grid.validate();
        try {
            scenario().validate();
            battery().validate();
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
    }

    bool operator==(const RunConfig&) const = default;
};

inline const std::vector<std::string>& keys() {
    static const std::vector<std::string> k = {"ps_dbm", "n",      "d_tot",    "d1_frac",  "d2_frac",    "delta",
                                               "cb_mah", "dd",     "vb",       "eta",      "trials",     "seed",
                                               "grid_min", "grid_max", "grid_points", "grid_scale", "precision", "out"};
    return k;
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T v{};
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw ConfigError("bad value for " + key + ": '" + text + "'");
    return v;
}

// Shortest text that parses back to the same double.
inline std::string exact(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

} // namespace detail

/// Set one key from its text form.
inline void set(RunConfig& c, const std::string& key, const std::string& raw) {
    using detail::parse_number;
    const std::string value = detail::trim(raw);
    if (key == "ps_dbm") c.ps_dbm = parse_number<double>(key, value);
    else if (key == "n") c.n = parse_number<int>(key, value);
    else if (key == "d_tot") c.d_tot = parse_number<double>(key, value);
    else if (key == "d1_frac") c.d1_frac = parse_number<double>(key, value);
    else if (key == "d2_frac") c.d2_frac = parse_number<double>(key, value);
    else if (key == "delta") c.delta = parse_number<double>(key, value);
    else if (key == "cb_mah") c.cb_mah = parse_number<double>(key, value);
    else if (key == "dd") c.dd = parse_number<double>(key, value);
    else if (key == "vb") c.vb = parse_number<double>(key, value);
    else if (key == "eta") c.eta = parse_number<double>(key, value);
    else if (key == "trials") c.trials = parse_number<std::uint64_t>(key, value);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "grid_min") c.grid.min = parse_number<double>(key, value);
    else if (key == "grid_max") c.grid.max = parse_number<double>(key, value);
    else if (key == "grid_points") c.grid.points = parse_number<int>(key, value);
    else if (key == "grid_scale") {
        if (value == "linear") c.grid.scale = GridScale::Linear;
        else if (value == "log") c.grid.scale = GridScale::Log;
        else throw ConfigError("grid_scale must be 'linear' or 'log'");
    } else if (key == "precision") c.precision = parse_number<int>(key, value);
    else if (key == "out") c.out = value;
    else throw ConfigError("unknown config key '" + key + "'");
}

inline std::string get(const RunConfig& c, const std::string& key) {
    using detail::exact;
    if (key == "ps_dbm") return exact(c.ps_dbm);
    if (key == "n") return std::to_string(c.n);
    if (key == "d_tot") return exact(c.d_tot);
    if (key == "d1_frac") return exact(c.d1_frac);
    if (key == "d2_frac") return exact(c.d2_frac);
    if (key == "delta") return exact(c.delta);
    if (key == "cb_mah") return exact(c.cb_mah);
    if (key == "dd") return exact(c.dd);
    if (key == "vb") return exact(c.vb);
    if (key == "eta") return exact(c.eta);
    if (key == "trials") return std::to_string(c.trials);
    if (key == "seed") return std::to_string(c.seed);
    if (key == "grid_min") return exact(c.grid.min);
    if (key == "grid_max") return exact(c.grid.max);
    if (key == "grid_points") return std::to_string(c.grid.points);
    if (key == "grid_scale") return c.grid.scale == GridScale::Linear ? "linear" : "log";
    if (key == "precision") return std::to_string(c.precision);
    if (key == "out") return c.out;
    throw ConfigError("unknown config key '" + key + "'");
}

/// Parse "key = value" lines; '#' starts a comment. Keys not present keep
/// their defaults.
inline RunConfig parse(const std::string& text, RunConfig base = {}) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        set(base, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return base;
}

inline std::string serialize(const RunConfig& c) {
    std::string s;
    for (const auto& k : keys()) s += k + " = " + get(c, k) + "\n";
    return s;
}

} // namespace rischarge::config
