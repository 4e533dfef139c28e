#pragma once

// Battery recharging time T_r = alpha / P_r, in hours.

#include <cmath>
#include <numbers>
#include <optional>

#include "rischarge/channel.hpp"
#include "rischarge/error.hpp"
#include "rischarge/meijer_g.hpp"
#include "rischarge/power.hpp"
#include "rischarge/specfun.hpp"

namespace rischarge::brt {

using power::ScenarioConfig;

struct BatteryProfile {
    double capacity_ah = 10e-3;
    double discharge_depth = 0.4;
    double voltage = 1.2;
    double rfeh_efficiency = 0.5;

    void validate() const {
        if (!(capacity_ah > 0.0) || !std::isfinite(capacity_ah)) throw DomainError("BatteryProfile: capacity must be > 0");
        if (!(discharge_depth > 0.0 && discharge_depth <= 1.0)) throw DomainError("BatteryProfile: discharge depth must be in (0, 1]");
        if (!(voltage > 0.0) || !std::isfinite(voltage)) throw DomainError("BatteryProfile: voltage must be > 0");
        if (!(rfeh_efficiency > 0.0 && rfeh_efficiency <= 1.0)) throw DomainError("BatteryProfile: efficiency must be in (0, 1]");
    }
};

/// alpha = C_b D_d V_b / eta, watt-hours.
inline double conversion_coefficient(const BatteryProfile& b) {
    b.validate();
    return b.capacity_ah * b.discharge_depth * b.voltage / b.rfeh_efficiency;
}

namespace detail {
inline void check_tau(double tau, const char* who) {
    if (!(tau > 0.0)) throw DomainError(std::string(who) + ": tau must be positive");
}
inline void check_alpha(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive and finite");
}
} // namespace detail

inline double log_brt_pdf(double tau, const ScenarioConfig& cfg, const channel::ApproximantParams& p, double alpha) {
    detail::check_tau(tau, "brt_pdf");
    detail::check_alpha(alpha);
    const auto v = power::detail::power_kernel(alpha / tau, cfg, p);
    if (v.sign < 0) throw DomainError("log_brt_pdf: approximant density is negative here");
    return p.log_a1 + std::log(p.a2) - std::log(2.0 * tau) + v.log_value;
}

/// (a1 a2 / 2 tau) G2012(sqrt(alpha / (Pbar tau)) / a2 | a3+1; a5+1, a4+1).
inline double brt_pdf(double tau, const ScenarioConfig& cfg, const channel::ApproximantParams& p, double alpha) {
    detail::check_tau(tau, "brt_pdf");
    detail::check_alpha(alpha);
    return specfun::signed_exp(power::detail::power_kernel(alpha / tau, cfg, p),
                               p.log_a1 + std::log(p.a2) - std::log(2.0 * tau));
}

inline double brt_cdf(double tau, const ScenarioConfig& cfg, const channel::ApproximantParams& p, double alpha) {
    detail::check_tau(tau, "brt_cdf");
    detail::check_alpha(alpha);
    if (std::isinf(tau)) return 1.0;
    return 1.0 - power::power_cdf(alpha / tau, cfg, p);
}

// Exact N = 1 law.

inline double brt_pdf_n1(double tau, const ScenarioConfig& cfg, double alpha) {
    detail::check_tau(tau, "brt_pdf_n1");
    detail::check_alpha(alpha);
    const double x = alpha / tau;
    return alpha / (tau * tau) * power::power_pdf_n1(x, cfg);
}

inline double brt_cdf_n1(double tau, const ScenarioConfig& cfg, double alpha) {
    detail::check_tau(tau, "brt_cdf_n1");
    detail::check_alpha(alpha);
    if (std::isinf(tau)) return 1.0;
    return 1.0 - power::power_cdf_n1(alpha / tau, cfg);
}

// Moments.

/// Existence gate: the integral of tau^n f(tau) converges iff
/// min Re(a4, a5) + 1 - 2n > 0.
inline bool brt_moment_defined(int n, const channel::ApproximantParams& p) {
    return n >= 1 && p.min_lower_real() + 1.0 - 2.0 * n > 0.0;
}

inline double brt_moment(int n, const ScenarioConfig& cfg, const channel::ApproximantParams& p, double alpha) {
    if (n < 1) throw DomainError("brt_moment: order must be >= 1");
    detail::check_alpha(alpha);
    const double shift = 1.0 - 2.0 * n;
    if (!brt_moment_defined(n, p)) {
        throw MomentUndefined(n, "tail exponent min(a4, a5) + 1 - 2n <= 0, the defining integral diverges");
    }
    const double den_arg = p.a3 + shift;
    if (specfun::detail::is_nonpositive_integer(den_arg)) throw MomentUndefined(n, "Gamma pole in the denominator");
    const double pbar = power::avg_received_power(cfg);
    const double log_num = (specfun::log_gamma(p.a4 + shift) + specfun::log_gamma(p.a5 + shift)).real();
    const double log_m = p.log_a1 + shift * std::log(p.a2) + n * std::log(alpha / pbar) + log_num -
                         specfun::log_gamma(den_arg);
    const double m = std::exp(log_m);
    if (!std::isfinite(m)) throw OverflowError("brt_moment: value not representable");
    return m;
}

inline std::optional<double> brt_moment_if_defined(int n, const ScenarioConfig& cfg,
                                                   const channel::ApproximantParams& p, double alpha) {
    if (!brt_moment_defined(n, p)) return std::nullopt;
    try {
        return brt_moment(n, cfg, p, alpha);
    } catch (const MomentUndefined&) {
        return std::nullopt;
    }
}

struct Statistic {
    double value = std::numeric_limits<double>::quiet_NaN();
    bool defined = false;
};

struct BrtSummary {
    Statistic mean;
    Statistic variance;
    Statistic skewness; // mu3 / mu2^(3/2), raw moments
    Statistic kurtosis; // mu4 / mu2^2 - 3, raw moments
    Statistic aof;      // variance / mean^2
};

inline BrtSummary brt_summary(const ScenarioConfig& cfg, const channel::ApproximantParams& p, double alpha) {
    std::optional<double> m[5];
    for (int n = 1; n <= 4; ++n) m[n] = brt_moment_if_defined(n, cfg, p, alpha);
    BrtSummary s;
    if (m[1]) s.mean = {*m[1], true};
    if (m[1] && m[2]) {
        s.variance = {std::max(0.0, *m[2] - *m[1] * *m[1]), true};
        s.aof = {s.variance.value / (*m[1] * *m[1]), true};
    }
    if (m[2] && m[3]) s.skewness = {*m[3] / std::pow(*m[2], 1.5), true};
    if (m[2] && m[4]) s.kurtosis = {*m[4] / (*m[2] * *m[2]) - 3.0, true};
    return s;
}

// Large-N (Gaussian gain) law.

inline double log_brt_pdf_clt(double tau, const ScenarioConfig& cfg, double alpha) {
    detail::check_tau(tau, "brt_pdf_clt");
    detail::check_alpha(alpha);
    constexpr double pi = std::numbers::pi;
    const double pbar = power::avg_received_power(cfg);
    const double n = cfg.n();
    const double k = 16.0 - pi * pi;
    const double exponent = (4.0 * alpha / tau + n * n * pi * pi * pbar) / (2.0 * n * k * pbar);
    const double bessel_arg = 2.0 * pi / (k * pbar) * std::sqrt(pbar * alpha / tau);
    return std::log(2.0 * alpha / (tau * tau * n * k * pbar)) +
           0.25 * std::log(tau * n * n * pi * pi * pbar / (4.0 * alpha)) +
           specfun::log_exp_bessel(exponent, bessel_arg);
}

inline double brt_pdf_clt(double tau, const ScenarioConfig& cfg, double alpha) {
    return std::exp(log_brt_pdf_clt(tau, cfg, alpha));
}

inline double brt_cdf_clt(double tau, const ScenarioConfig& cfg, double alpha) {
    detail::check_tau(tau, "brt_cdf_clt");
    detail::check_alpha(alpha);
    if (std::isinf(tau)) return 1.0;
    return 1.0 - power::power_cdf_clt(alpha / tau, cfg);
}

/// 4 alpha / ((N^2 pi^2 + N (16 - pi^2)) Pbar).
inline double brt_mean_clt(const ScenarioConfig& cfg, double alpha) {
    detail::check_alpha(alpha);
    constexpr double pi = std::numbers::pi;
    const double n = cfg.n();
    return 4.0 * alpha / ((n * n * pi * pi + n * (16.0 - pi * pi)) * power::avg_received_power(cfg));
}

} // namespace rischarge::brt
