#pragma once

// Quadrature oracles shared by the tests. They integrate in log-space so the
// same routine handles peaked densities, heavy tails and endpoint
// singularities.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace testsupport {

/// int_lo^hi f(x) dx for 0 < lo < hi via x = e^u.
inline double integrate_log(const std::function<double(double)>& f, double lo, double hi) {
    auto g = [&](double u) {
        const double x = std::exp(u);
        const double v = f(x);
        return std::isfinite(v) ? v * x : 0.0;
    };
    // split into unit-width pieces in u so narrow peaks are never skipped
    const double a = std::log(lo), b = std::log(hi);
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / 0.5)));
    double total = 0.0;
    for (int i = 0; i < pieces; ++i) {
        const double u0 = a + (b - a) * i / pieces;
        const double u1 = a + (b - a) * (i + 1) / pieces;
        total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, u0, u1, 12, 1e-13);
    }
    return total;
}

/// int_0^inf f over the bulk [scale e^-40, scale e^40].
inline double integrate_positive(const std::function<double(double)>& f, double scale) {
    return integrate_log(f, scale * std::exp(-40.0), scale * std::exp(40.0));
}

inline std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> v(points);
    for (int i = 0; i < points; ++i) v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
    return v;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace testsupport
