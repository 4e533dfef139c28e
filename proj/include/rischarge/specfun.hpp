#pragma once

// Special functions used by the closed-form BRT statistics: Gamma (real and
// complex log-Gamma), incomplete Gamma in log form, K0/K1, and the order -1/2
// modified Bessel function with a fused overflow-safe evaluation.

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "rischarge/error.hpp"

namespace rischarge::specfun {

using cplx = std::complex<double>;

namespace detail {

inline bool is_nonpositive_integer(double x) {
    return x <= 0.0 && std::floor(x) == x;
}

inline std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace detail

/// Gamma function. Throws PoleError at 0, -1, -2, ... and OverflowError
/// when the result is not representable (x > ~171.6).
inline double gamma_fn(double x) {
    if (std::isnan(x)) throw DomainError("gamma_fn: NaN argument");
    if (detail::is_nonpositive_integer(x)) throw PoleError("gamma_fn: pole at x = " + detail::fmt(x));
    const double g = std::tgamma(x);
    if (std::isinf(g)) throw OverflowError("gamma_fn: overflow at x = " + detail::fmt(x));
    return g;
}

/// log|Gamma(x)|, usable far beyond the overflow point of gamma_fn.
inline double log_gamma(double x) {
    if (std::isnan(x)) throw DomainError("log_gamma: NaN argument");
    if (detail::is_nonpositive_integer(x)) throw PoleError("log_gamma: pole at x = " + detail::fmt(x));
    int sign = 0;
    return ::lgamma_r(x, &sign);
}

/// Principal-ish complex log-Gamma. The imaginary part is only defined
/// modulo 2*pi, which is all callers need (they exponentiate or take the
/// real part). Returns -inf real part at the poles.
inline cplx log_gamma(cplx z) {
    if (z.imag() == 0.0) {
        const double x = z.real();
        if (detail::is_nonpositive_integer(x)) return {-std::numeric_limits<double>::infinity(), 0.0};
        int sign = 0;
        const double lg = ::lgamma_r(x, &sign);
        return {lg, sign < 0 ? std::numbers::pi : 0.0};
    }
    // Shift right until the Stirling series is accurate to double precision.
    cplx shift_log{0.0, 0.0};
    while (z.real() < 15.0) {
        shift_log += std::log(z);
        z += 1.0;
    }
    static constexpr double bernoulli_coeff[] = {
        1.0 / 12.0,         -1.0 / 360.0,          1.0 / 1260.0,         -1.0 / 1680.0,
        1.0 / 1188.0,       -691.0 / 360360.0,     1.0 / 156.0,          -3617.0 / 122400.0,
    };
    const cplx inv = 1.0 / z;
    const cplx inv2 = inv * inv;
    cplx series{0.0, 0.0};
    cplx power = inv;
    for (double c : bernoulli_coeff) {
        series += c * power;
        power *= inv2;
    }
    const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
    return (z - 0.5) * std::log(z) - z + half_log_2pi + series - shift_log;
}

// ---------------------------------------------------------------------------
// Incomplete Gamma in log form, complex shape parameter, real x > 0.

namespace detail {

// log gamma(c, x) by the power series x^c e^-x sum x^k / (c)_{k+1}.
inline cplx log_lower_gamma_series(cplx c, double x) {
    cplx term = 1.0 / c;
    cplx sum = term;
    for (int k = 1; k < 100000; ++k) {
        term *= x / (c + static_cast<double>(k));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) {
            return c * std::log(x) - x + std::log(sum);
        }
    }
    throw ConvergenceError("incomplete-gamma series", std::abs(term / sum),
                           "lower incomplete gamma series did not converge at x = " + fmt(x));
}

// log(e^x Gamma(c, x)) by the Legendre continued fraction (modified Lentz).
inline cplx log_upper_gamma_cf_scaled(cplx c, double x) {
    constexpr double tiny = 1e-300;
    cplx b = x + 1.0 - c;
    cplx cc = 1.0 / tiny;
    cplx d = 1.0 / b;
    cplx h = d;
    for (int i = 1; i < 100000; ++i) {
        const cplx an = -static_cast<double>(i) * (static_cast<double>(i) - c);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        cc = b + an / cc;
        if (std::abs(cc) < tiny) cc = tiny;
        d = 1.0 / d;
        const cplx del = d * cc;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) {
            return c * std::log(x) + std::log(h);
        }
    }
    throw ConvergenceError("incomplete-gamma continued fraction", std::abs(h),
                           "upper incomplete gamma continued fraction did not converge at x = " + fmt(x));
}

inline cplx log_upper_gamma_cf(cplx c, double x) { return log_upper_gamma_cf_scaled(c, x) - x; }

// log(exp(a) - exp(b)) for |exp(b)| < |exp(a)|.
inline cplx log_diff_exp(cplx a, cplx b) {
    return a + std::log(1.0 - std::exp(b - a));
}

} // namespace detail

/// log of the lower incomplete Gamma gamma(c, x) = int_0^x t^(c-1) e^-t dt.
inline cplx log_lower_gamma(cplx c, double x) {
    if (!(x > 0.0)) throw DomainError("log_lower_gamma: x must be positive");
    if (x < c.real() + 1.0) return detail::log_lower_gamma_series(c, x);
    return detail::log_diff_exp(log_gamma(c), detail::log_upper_gamma_cf(c, x));
}

/// log of the upper incomplete Gamma Gamma(c, x) = int_x^inf t^(c-1) e^-t dt.
inline cplx log_upper_gamma(cplx c, double x) {
    if (!(x > 0.0)) throw DomainError("log_upper_gamma: x must be positive");
    if (x < c.real() + 1.0) return detail::log_diff_exp(log_gamma(c), detail::log_lower_gamma_series(c, x));
    return detail::log_upper_gamma_cf(c, x);
}

/// log(e^x Gamma(c, x)); keeps full relative accuracy when x is large.
inline cplx log_upper_gamma_scaled(cplx c, double x) {
    if (!(x > 0.0)) throw DomainError("log_upper_gamma_scaled: x must be positive");
    if (x < c.real() + 1.0) return log_upper_gamma(c, x) + x;
    return detail::log_upper_gamma_cf_scaled(c, x);
}

// ---------------------------------------------------------------------------
// Modified Bessel functions.

/// log K0(x) for x > 30 from the large-argument expansion; accurate to
/// double precision there and free of underflow.
inline double log_bessel_k0(double x) {
    if (!(x > 0.0)) throw DomainError("log_bessel_k0: x must be positive, got " + detail::fmt(x));
    if (x <= 30.0) return std::log(boost::math::cyl_bessel_k(0, x));
    // K0(x) ~ sqrt(pi/2x) e^-x sum_k (-1)^k ((2k-1)!!)^2 / (k! (8x)^k)
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = -term * odd * odd / (k * 8.0 * x);
        if (std::abs(next) > std::abs(term)) break;
        term = next;
        sum += term;
        if (std::abs(term) < 1e-18) break;
    }
    return 0.5 * std::log(std::numbers::pi / (2.0 * x)) - x + std::log(sum);
}

/// K0(x), x > 0. Diverges logarithmically as x -> 0+.
inline double bessel_k0(double x) {
    if (!(x > 0.0)) throw DomainError("bessel_k0: x must be positive, got " + detail::fmt(x));
    if (x > 700.0) return std::exp(log_bessel_k0(x));
    return boost::math::cyl_bessel_k(0, x);
}

inline double bessel_k1(double x) {
    if (!(x > 0.0)) throw DomainError("bessel_k1: x must be positive, got " + detail::fmt(x));
    if (x > 700.0) return 0.0;
    return boost::math::cyl_bessel_k(1, x);
}

/// I_{-1/2}(z) = sqrt(2/(pi z)) cosh z.
inline double bessel_i_neg_half(double z) {
    if (!(z > 0.0)) throw DomainError("bessel_i_neg_half: z must be positive, got " + detail::fmt(z));
    const double v = std::sqrt(2.0 / (std::numbers::pi * z)) * std::cosh(z);
    if (std::isinf(v)) throw OverflowError("bessel_i_neg_half: overflow at z = " + detail::fmt(z));
    return v;
}

/// log I_{-1/2}(z), finite for any z > 0.
inline double log_bessel_i_neg_half(double z) {
    if (!(z > 0.0)) throw DomainError("log_bessel_i_neg_half: z must be positive, got " + detail::fmt(z));
    // log cosh z = z - log 2 + log1p(e^{-2z})
    return 0.5 * std::log(2.0 / (std::numbers::pi * z)) + z - std::numbers::ln2 + std::log1p(std::exp(-2.0 * z));
}

/// log(exp(-A) * I_{-1/2}(B)) with cosh expanded as (e^{B-A} + e^{-B-A})/2.
inline double log_exp_bessel(double A, double B) {
    if (!(B > 0.0)) throw DomainError("log_exp_bessel: B must be positive, got " + detail::fmt(B));
    return -A + log_bessel_i_neg_half(B);
}

} // namespace rischarge::specfun
