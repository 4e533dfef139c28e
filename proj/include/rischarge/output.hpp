#pragma once

// CSV tables with locale-independent numbers, and empirical densities.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "rischarge/error.hpp"

namespace rischarge::output {

/// General-format number with the requested significant digits.
inline std::string format_number(double v, int precision) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, precision);
    return std::string(buf, r.ptr);
}

using Cell = std::optional<double>; // empty = undefined

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;

    std::string to_csv(int precision) const {
        std::string s;
        for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
        s += '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) s += ',';
                if (row[i]) s += format_number(*row[i], precision);
            }
            s += '\n';
        }
        return s;
    }

    std::size_t column(const std::string& name) const {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw Error("no column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    }
};

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw Error("write to '" + path + "' failed");
}

/// Histogram density over [lo, hi] with Freedman-Diaconis bin width computed
/// from the whole sample (at least 50 bins across [lo, hi]). Normalised by the
/// full sample size, so mass outside [lo, hi] is simply not shown.
class Histogram {
public:
    Histogram(const std::vector<double>& sorted, double lo, double hi) : lo_(lo), hi_(hi) {
        if (sorted.empty()) throw DomainError("Histogram: empty sample");
        if (!(lo < hi)) throw DomainError("Histogram: lo must be < hi");
        const std::size_t n = sorted.size();
        const double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
        const double fd_width = 2.0 * iqr / std::cbrt(static_cast<double>(n));
        std::size_t bins = 50;
        if (fd_width > 0.0) bins = std::max<std::size_t>(50, static_cast<std::size_t>(std::ceil((hi - lo) / fd_width)));
        bins = std::min<std::size_t>(bins, 1000000);
        width_ = (hi - lo) / static_cast<double>(bins);
        density_.assign(bins, 0.0);
        const auto first = std::lower_bound(sorted.begin(), sorted.end(), lo);
        const auto last = std::upper_bound(sorted.begin(), sorted.end(), hi);
        for (auto it = first; it != last; ++it) {
            auto b = static_cast<std::size_t>((*it - lo) / width_);
            density_[std::min(b, bins - 1)] += 1.0;
        }
        for (double& d : density_) d /= static_cast<double>(n) * width_;
    }

    std::size_t bins() const { return density_.size(); }
    double width() const { return width_; }

    double operator()(double x) const {
        if (x < lo_ || x > hi_) return 0.0;
        const auto b = std::min(static_cast<std::size_t>((x - lo_) / width_), density_.size() - 1);
        return density_[b];
    }

    /// Linear-interpolated sample quantile.
    static double quantile(const std::vector<double>& sorted, double q) {
        const double pos = q * static_cast<double>(sorted.size() - 1);
        const auto i = static_cast<std::size_t>(pos);
        if (i + 1 >= sorted.size()) return sorted.back();
        return sorted[i] + (pos - i) * (sorted[i + 1] - sorted[i]);
    }

private:
    double lo_, hi_, width_;
    std::vector<double> density_;
};

} // namespace rischarge::output
