#pragma once

// Received power P_r = Pbar * B^2 at the energy receiver: geometry, unit
// conversion, and the approximant, exact single-element and large-N laws.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "rischarge/channel.hpp"
#include "rischarge/error.hpp"
#include "rischarge/meijer_g.hpp"
#include "rischarge/specfun.hpp"

namespace rischarge::power {

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

struct ScenarioConfig {
    double ps_watts = 0.1; // transmit power
    double d1 = 2.5;       // source -> RIS, metres
    double d2 = 2.5;       // RIS -> receiver, metres
    double delta = 2.7;    // path-loss exponent
    channel::ChannelConfig channel{};

    int n() const { return channel.n_elements; }

    void validate() const {
        channel.validate();
        auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
        if (!positive(ps_watts)) throw DomainError("ScenarioConfig: transmit power must be positive and finite");
        if (!positive(d1) || !positive(d2)) throw DomainError("ScenarioConfig: distances must be positive and finite");
        // delta = 0 is accepted as the no-path-loss limit
        if (!(delta >= 0.0) || !std::isfinite(delta)) throw DomainError("ScenarioConfig: path-loss exponent must be >= 0");
    }

    std::vector<std::string> warnings() const {
        std::vector<std::string> w;
        if (delta < 2.0 || delta > 4.0) w.push_back("path-loss exponent outside the usual [2, 4] range");
        return w;
    }
};

/// Pbar = P_s / (d1^delta d2^delta).
inline double avg_received_power(const ScenarioConfig& cfg) {
    cfg.validate();
    return cfg.ps_watts / (std::pow(cfg.d1, cfg.delta) * std::pow(cfg.d2, cfg.delta));
}

/// F_Pr(x) = F_B(sqrt(x / Pbar)).
inline double power_cdf(double x, const ScenarioConfig& cfg, const channel::ApproximantParams& p) {
    if (!(x >= 0.0)) throw DomainError("power_cdf: x must be >= 0");
    return channel::gain_cdf(std::sqrt(x / avg_received_power(cfg)), p);
}

namespace detail {
inline specfun::MeijerGValue power_kernel(double x, const ScenarioConfig& cfg, const channel::ApproximantParams& p) {
    if (!(x > 0.0)) throw DomainError("power_pdf: x must be positive");
    const double arg = std::sqrt(x / avg_received_power(cfg)) / p.a2;
    return specfun::meijer_g_eval(specfun::MeijerGSpec::density(p.a3 + 1.0, p.a5 + 1.0, p.a4 + 1.0), arg);
}
} // namespace detail

inline double log_power_pdf(double x, const ScenarioConfig& cfg, const channel::ApproximantParams& p) {
    const auto v = detail::power_kernel(x, cfg, p);
    if (v.sign < 0) throw DomainError("log_power_pdf: approximant density is negative here");
    return p.log_a1 + std::log(p.a2) - std::log(2.0 * x) + v.log_value;
}

/// f_Pr(x) = a1 a2 / (2x) G2012(sqrt(x/Pbar)/a2 | a3+1; a5+1, a4+1).
inline double power_pdf(double x, const ScenarioConfig& cfg, const channel::ApproximantParams& p) {
    return specfun::signed_exp(detail::power_kernel(x, cfg, p), p.log_a1 + std::log(p.a2) - std::log(2.0 * x));
}

// ---------------------------------------------------------------------------
// Single element: B is double Rayleigh with density b K0(b), so P_r has
// density (2/W) K0(2 sqrt(x/W)) with W = E[P_r] = 4 Pbar.

inline double n1_mean_power(const ScenarioConfig& cfg) {
    if (cfg.n() != 1) throw DomainError("single-element law requires N = 1");
    return channel::gain_moments(cfg.channel).mu2 * avg_received_power(cfg);
}

inline double power_pdf_n1(double x, const ScenarioConfig& cfg) {
    if (!(x > 0.0)) throw DomainError("power_pdf_n1: x must be positive");
    const double w = n1_mean_power(cfg);
    const double arg = 2.0 * std::sqrt(x / w);
    return std::exp(std::log(2.0 / w) + specfun::log_bessel_k0(arg));
}

/// 1 - y K1(y), y = 2 sqrt(x/W).
inline double power_cdf_n1(double x, const ScenarioConfig& cfg) {
    if (!(x >= 0.0)) throw DomainError("power_cdf_n1: x must be >= 0");
    const double w = n1_mean_power(cfg);
    if (x == 0.0) return 0.0;
    return channel::gain_cdf_n1(2.0 * std::sqrt(x / w));
}

// ---------------------------------------------------------------------------
// Large N: B ~ Normal(mu_N, sigma_N^2), P_r = Pbar B^2.

struct CltMoments {
    double mean;
    double variance;
};

inline CltMoments clt_moments(int n) {
    constexpr double pi = std::numbers::pi;
    return {n * pi / 2.0, n * (16.0 - pi * pi) / 4.0};
}

inline double log_power_pdf_clt(double x, const ScenarioConfig& cfg) {
    if (!(x > 0.0)) throw DomainError("power_pdf_clt: x must be positive");
    constexpr double pi = std::numbers::pi;
    const double pbar = avg_received_power(cfg);
    const double n = cfg.n();
    const double k = 16.0 - pi * pi;
    const double exponent = (4.0 * x + n * n * pi * pi * pbar) / (2.0 * n * k * pbar);
    const double bessel_arg = 2.0 * pi / (k * pbar) * std::sqrt(pbar * x);
    return std::log(2.0 / (n * k * pbar)) + 0.25 * std::log(n * n * pi * pi * pbar / (4.0 * x)) +
           specfun::log_exp_bessel(exponent, bessel_arg);
}

/// Noncentral chi-square (one degree of freedom) form with I_{-1/2}, evaluated
/// through the fused exp * Bessel path.
inline double power_pdf_clt(double x, const ScenarioConfig& cfg) {
    return std::exp(log_power_pdf_clt(x, cfg));
}

/// Same density written as the change of variables of a folded normal.
inline double power_pdf_clt_folded(double x, const ScenarioConfig& cfg) {
    if (!(x > 0.0)) throw DomainError("power_pdf_clt_folded: x must be positive");
    const double pbar = avg_received_power(cfg);
    const auto [mu, var] = clt_moments(cfg.n());
    const double sigma = std::sqrt(var);
    const double y = std::sqrt(x / pbar);
    auto phi = [](double u) { return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi); };
    return (phi((y - mu) / sigma) + phi((y + mu) / sigma)) / (2.0 * sigma * std::sqrt(x * pbar));
}

inline double power_cdf_clt(double x, const ScenarioConfig& cfg) {
    if (!(x >= 0.0)) throw DomainError("power_cdf_clt: x must be >= 0");
    const double pbar = avg_received_power(cfg);
    const auto [mu, var] = clt_moments(cfg.n());
    const double sigma = std::sqrt(var);
    const double y = std::sqrt(x / pbar);
    // Phi((y-mu)/s) - Phi((-y-mu)/s), both via erfc to keep the tails accurate
    const double upper = 0.5 * std::erfc(-(y - mu) / (sigma * std::numbers::sqrt2));
    const double lower = 0.5 * std::erfc((y + mu) / (sigma * std::numbers::sqrt2));
    return std::clamp(upper - lower, 0.0, 1.0);
}

} // namespace rischarge::power
