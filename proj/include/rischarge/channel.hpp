#pragma once

// Statistics of the end-to-end gain B = sum_i |h_i||g_i| of an RIS link with
// N reflecting elements and unit-scale Rayleigh hops: exact raw moments, the
// moment-matched Meijer-G approximant, and its PDF/CDF.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "rischarge/error.hpp"
#include "rischarge/meijer_g.hpp"
#include "rischarge/specfun.hpp"

namespace rischarge::channel {

using specfun::cplx;

struct ChannelConfig {
    int n_elements = 1;
    double rayleigh_scale = 1.0;

    void validate() const {
        if (n_elements < 1) throw DomainError("ChannelConfig: n_elements must be >= 1");
        if (rayleigh_scale != 1.0) throw DomainError("ChannelConfig: rayleigh_scale is fixed to 1");
    }
};

/// Raw moments E[B^j], j = 1..4.
struct GainMoments {
    double mu1 = 0.0;
    double mu2 = 0.0;
    double mu3 = 0.0;
    double mu4 = 0.0;

    bool satisfies_invariants() const {
        const bool positive = mu1 > 0.0 && mu2 > 0.0 && mu3 > 0.0 && mu4 > 0.0;
        const bool finite = std::isfinite(mu1) && std::isfinite(mu2) && std::isfinite(mu3) && std::isfinite(mu4);
        return positive && finite && mu2 >= mu1 * mu1 && mu4 * mu2 >= mu3 * mu3;
    }
};

/// Fitted constants of f_B(x) ~ a1 G2012(x/a2 | a3; a4, a5).
///
/// For small N (1..3) the fit yields a complex-conjugate pair a4, a5; the
/// density is still real and positive. a1 underflows for N of a few dozen, so
/// log_a1 is the quantity used downstream.
struct ApproximantParams {
    double a1 = 0.0;
    double log_a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
    cplx a4{};
    cplx a5{};
    double a6 = 0.0;
    cplx a7{};
    double phi2 = 0.0;
    double phi3 = 0.0;
    double phi4 = 0.0;
    double mu1 = 0.0;

    bool complex_pair() const { return a4.imag() != 0.0; }

    /// Smallest real part of the lower parameters; controls the x -> 0 power law
    /// and the BRT moment existence gate.
    double min_lower_real() const { return std::min(a4.real(), a5.real()); }

    specfun::MeijerGSpec density_spec() const { return specfun::MeijerGSpec::density(a3, a4, a5); }
    specfun::MeijerGSpec cumulative_spec() const { return specfun::MeijerGSpec::cumulative(a3, a4, a5); }
};

/// Closed-form moments, piecewise in N exactly as tabulated.
inline GainMoments gain_moments(const ChannelConfig& cfg) {
    cfg.validate();
    constexpr double pi = std::numbers::pi;
    constexpr double pi2 = pi * pi;
    const double n = cfg.n_elements;
    GainMoments m;
    m.mu1 = n * pi / 2.0;
    m.mu2 = (4.0 + (n - 1.0) * pi2 / 4.0) * n;
    if (cfg.n_elements >= 3) {
        m.mu3 = n * pi * (9.0 / 2.0 + 6.0 * (n - 1.0) + (n - 1.0) * (n - 2.0) * pi2 / 8.0);
    } else if (cfg.n_elements == 2) {
        m.mu3 = 21.0 * pi;
    } else {
        m.mu3 = 9.0 * pi / 2.0;
    }
    if (cfg.n_elements >= 4) {
        m.mu4 = 64.0 * n + 48.0 * n * (n - 1.0) + 9.0 * n * (n - 1.0) * pi2 + 6.0 * n * (n - 1.0) * (n - 2.0) * pi2 +
                n * (n - 1.0) * (n - 2.0) * (n - 3.0) * pi2 * pi2 / 16.0;
    } else if (cfg.n_elements == 3) {
        m.mu4 = 480.0 + 90.0 * pi2;
    } else if (cfg.n_elements == 2) {
        m.mu4 = 224.0 + 18.0 * pi2;
    } else {
        m.mu4 = 64.0;
    }
    return m;
}

/// Moment-ratio fit of the approximant. The fitted density reproduces
/// mu1..mu4 exactly: phi_j = mu_j / mu_{j-1} = a2 (a4+j)(a5+j)/(a3+j) for
/// j = 1..4, and the formulas below are the closed-form solution of that
/// linear system (third differences give a3, second differences a2).
inline ApproximantParams fit_approximant(const GainMoments& m) {
    if (!m.satisfies_invariants()) {
        throw IllConditioned("fit_approximant: moments violate positivity, Jensen or Cauchy-Schwarz bounds");
    }
    ApproximantParams p;
    p.mu1 = m.mu1;
    p.phi2 = m.mu2 / m.mu1;
    p.phi3 = m.mu3 / m.mu2;
    p.phi4 = m.mu4 / m.mu3;
    const double mu1 = m.mu1;
    const double phi2 = p.phi2;
    const double phi3 = p.phi3;
    const double phi4 = p.phi4;

    p.a3 = (4.0 * phi4 - 9.0 * phi3 + 6.0 * phi2 - mu1) / (-phi4 + 3.0 * phi3 - 3.0 * phi2 + mu1);
    p.a2 = p.a3 / 2.0 * (phi4 - 2.0 * phi3 + phi2) + 2.0 * phi4 - 3.0 * phi3 + phi2;
    if (!std::isfinite(p.a3) || !std::isfinite(p.a2) || !(p.a2 > 0.0)) {
        throw IllConditioned("fit_approximant: a2 <= 0 or non-finite scale");
    }
    const double q = (p.a3 * (phi2 - mu1) + 2.0 * phi2 - mu1) / p.a2;
    p.a6 = q - 3.0;
    const double radicand = (q - 1.0) * (q - 1.0) - 4.0 * mu1 * (p.a3 + 1.0) / p.a2;
    p.a7 = std::sqrt(cplx{radicand, 0.0}); // purely imaginary when radicand < 0
    p.a4 = (p.a6 + p.a7) / 2.0;
    p.a5 = (p.a6 - p.a7) / 2.0;

    if (!(p.a3 + 1.0 > 0.0)) throw IllConditioned("fit_approximant: a3 + 1 <= 0");
    if (!(p.a4.real() + 1.0 > 0.0) || !(p.a5.real() + 1.0 > 0.0)) {
        throw IllConditioned("fit_approximant: Re(a4) + 1 or Re(a5) + 1 <= 0, density not normalisable");
    }
    if (!(p.a3 > p.a4.real())) throw IllConditioned("fit_approximant: a3 <= Re(a4)");

    p.log_a1 = specfun::log_gamma(p.a3 + 1.0) - std::log(p.a2) -
               (specfun::log_gamma(p.a4 + 1.0) + specfun::log_gamma(p.a5 + 1.0)).real();
    p.a1 = std::exp(p.log_a1);
    if (!std::isfinite(p.log_a1)) throw IllConditioned("fit_approximant: a1 not finite");
    return p;
}

inline ApproximantParams fit_approximant(const ChannelConfig& cfg) {
    return fit_approximant(gain_moments(cfg));
}

inline double log_gain_pdf(double x, const ApproximantParams& p) {
    if (!(x > 0.0)) throw DomainError("log_gain_pdf: x must be positive");
    return p.log_a1 + specfun::log_meijer_g(p.density_spec(), x / p.a2);
}

/// f_B(x) = a1 G2012(x/a2 | a3; a4, a5). For N <= 3 the fitted lower
/// parameters are complex and this dips slightly below zero far in the left
/// tail; the signed value is returned there.
inline double gain_pdf(double x, const ApproximantParams& p) {
    if (!(x >= 0.0)) throw DomainError("gain_pdf: x must be >= 0");
    if (x == 0.0) {
        const double lead = p.min_lower_real();
        if (lead > 0.0) return 0.0;
        if (lead < 0.0) return std::numeric_limits<double>::infinity();
        // finite limit a1 Gamma(b_hi - b_lo)/Gamma(a3 - b_lo) when the smaller exponent is 0
        const cplx blo = p.a4.real() <= p.a5.real() ? p.a4 : p.a5;
        const cplx bhi = p.a4.real() <= p.a5.real() ? p.a5 : p.a4;
        return std::exp(p.log_a1 + (specfun::log_gamma(bhi - blo) - specfun::log_gamma(p.a3 - blo)).real());
    }
    return specfun::signed_exp(specfun::meijer_g_eval(p.density_spec(), x / p.a2), p.log_a1);
}

/// F_B(x) = a1 a2 G2123(x/a2 | 1, a3+1; a4+1, a5+1, 0), clamped to [0, 1].
inline double gain_cdf(double x, const ApproximantParams& p) {
    if (!(x >= 0.0)) throw DomainError("gain_cdf: x must be >= 0");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    const auto v = specfun::meijer_g_eval(p.cumulative_spec(), x / p.a2);
    return std::clamp(specfun::signed_exp(v, p.log_a1 + std::log(p.a2)), 0.0, 1.0);
}

// Exact single-element law: B = |h||g| has density b K0(b).

inline double gain_pdf_n1(double x) {
    if (!(x >= 0.0)) throw DomainError("gain_pdf_n1: x must be >= 0");
    if (x == 0.0) return 0.0;
    return std::exp(std::log(x) + specfun::log_bessel_k0(x));
}

inline double gain_cdf_n1(double x) {
    if (!(x >= 0.0)) throw DomainError("gain_cdf_n1: x must be >= 0");
    if (x == 0.0) return 0.0;
    if (x > 1.0) return std::clamp(1.0 - x * specfun::bessel_k1(x), 0.0, 1.0);
    // 1 - x K1(x) cancels for small x; integrate the K0 series termwise:
    // sum_k x^(2k+2) / (4^k k!^2 (2k+2)) (H_k + 1/(2k+2) - gamma - ln(x/2))
    const double log_half = std::log(0.5 * x);
    double power = x * x;
    double harmonic = 0.0;
    double sum = 0.0;
    for (int k = 0; k < 40; ++k) {
        if (k > 0) {
            power *= x * x / (4.0 * k * k);
            harmonic += 1.0 / k;
        }
        const double m = 2.0 * k + 2.0;
        const double term = power / m * (harmonic + 1.0 / m - std::numbers::egamma - log_half);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return std::min(sum, 1.0);
}

// Gaussian large-N law, folded at zero so it matches the received-power form.

inline double gain_pdf_clt(double x, int n) {
    if (!(x >= 0.0)) throw DomainError("gain_pdf_clt: x must be >= 0");
    constexpr double pi = std::numbers::pi;
    const double mu = n * pi / 2.0;
    const double sigma = std::sqrt(n * (16.0 - pi * pi) / 4.0);
    auto phi = [](double u) { return std::exp(-0.5 * u * u) / std::sqrt(2.0 * pi); };
    return (phi((x - mu) / sigma) + phi((x + mu) / sigma)) / sigma;
}

inline double gain_cdf_clt(double x, int n) {
    if (!(x >= 0.0)) throw DomainError("gain_cdf_clt: x must be >= 0");
    constexpr double pi = std::numbers::pi;
    const double mu = n * pi / 2.0;
    const double s = std::sqrt(n * (16.0 - pi * pi) / 4.0) * std::numbers::sqrt2;
    return std::clamp(0.5 * std::erfc(-(x - mu) / s) - 0.5 * std::erfc((x + mu) / s), 0.0, 1.0);
}

} // namespace rischarge::channel
