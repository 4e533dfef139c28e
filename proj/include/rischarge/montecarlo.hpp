#pragma once

// Monte Carlo fading simulator and goodness-of-fit tools.
//
// Every trial draws from its own counter-keyed stream, so results depend on
// (seed, trial index) only and never on how trials are split across threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <thread>
#include <utility>
#include <vector>

#include "rischarge/brt.hpp"
#include "rischarge/channel.hpp"
#include "rischarge/error.hpp"
#include "rischarge/power.hpp"

namespace rischarge::montecarlo {

enum class Quantity { Gain, Power, Brt };

inline const char* to_string(Quantity q) {
    switch (q) {
    case Quantity::Gain: return "gain";
    case Quantity::Power: return "power";
    case Quantity::Brt: return "brt";
    }
    return "?";
}

/// SplitMix64 stream keyed by (seed, trial, substream).
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t trial, std::uint64_t substream = 0) {
        std::uint64_t s = mix(seed + 0x9E3779B97F4A7C15ULL);
        s = mix(s ^ mix(trial + 0xD1B54A32D192ED03ULL));
        state_ = mix(s ^ mix(substream + 0x8CB92BA72F3D8DD7ULL));
    }

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform on (0, 1], so log(u) is always finite.
    double uniform_open() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

    /// Rayleigh with unit scale (E[r^2] = 2) by inverse transform.
    double rayleigh() { return std::sqrt(-2.0 * std::log(uniform_open())); }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    std::uint64_t state_;
};

/// One draw of B = sum_i |h_i| |g_i|.
inline double sample_gain(const channel::ChannelConfig& cfg, std::uint64_t trial_index, std::uint64_t seed) {
    CounterRng h(seed, trial_index, 0);
    CounterRng g(seed, trial_index, 1);
    double b = 0.0;
    for (int i = 0; i < cfg.n_elements; ++i) b += h.rayleigh() * g.rayleigh();
    return b;
}

inline unsigned resolve_workers(unsigned workers) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    return workers;
}

/// Gain draws for trials [first, first + count), in trial order.
inline std::vector<double> draw_gains(const channel::ChannelConfig& cfg, std::uint64_t first, std::size_t count,
                                      std::uint64_t seed, unsigned workers = 0) {
    cfg.validate();
    std::vector<double> out(count);
    workers = std::min<unsigned>(resolve_workers(workers), std::max<std::size_t>(1, count / 4096 + 1));
    auto run = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) out[i] = sample_gain(cfg, first + i, seed);
    };
    if (workers <= 1) {
        run(0, count);
        return out;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = std::min(count, w * chunk);
        const std::size_t hi = std::min(count, lo + chunk);
        pool.emplace_back(run, lo, hi);
    }
    for (auto& t : pool) t.join();
    return out;
}

struct EmpiricalSample {
    std::vector<double> values; // ascending
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    Quantity quantity = Quantity::Gain;

    static EmpiricalSample from_draws(std::vector<double> draws, std::uint64_t seed, Quantity q) {
        std::sort(draws.begin(), draws.end());
        EmpiricalSample s;
        s.trials = draws.size();
        s.values = std::move(draws);
        s.seed = seed;
        s.quantity = q;
        return s;
    }

    /// Fraction of values <= x.
    double ecdf(double x) const {
        if (values.empty()) return 0.0;
        const auto it = std::upper_bound(values.begin(), values.end(), x);
        return static_cast<double>(it - values.begin()) / static_cast<double>(values.size());
    }
};

inline EmpiricalSample simulate_gain(const channel::ChannelConfig& cfg, std::size_t trials, std::uint64_t seed,
                                     unsigned workers = 0) {
    if (trials < 1) throw DomainError("simulate_gain: trials must be >= 1");
    return EmpiricalSample::from_draws(draw_gains(cfg, 0, trials, seed, workers), seed, Quantity::Gain);
}

struct Simulation {
    EmpiricalSample gain;
    EmpiricalSample power;
    EmpiricalSample brt;
};

/// B -> P_r = Pbar B^2 -> T_r = alpha / P_r, per trial.
inline Simulation simulate(const power::ScenarioConfig& cfg, const brt::BatteryProfile& battery, std::size_t trials,
                           std::uint64_t seed, unsigned workers = 0) {
    if (trials < 1) throw DomainError("simulate: trials must be >= 1");
    const double pbar = power::avg_received_power(cfg);
    const double alpha = brt::conversion_coefficient(battery);
    std::vector<double> gains = draw_gains(cfg.channel, 0, trials, seed, workers);
    std::vector<double> pw(trials), tr(trials);
    for (std::size_t i = 0; i < trials; ++i) {
        pw[i] = pbar * gains[i] * gains[i];
        tr[i] = alpha / pw[i];
    }
    Simulation sim;
    sim.gain = EmpiricalSample::from_draws(std::move(gains), seed, Quantity::Gain);
    sim.power = EmpiricalSample::from_draws(std::move(pw), seed, Quantity::Power);
    sim.brt = EmpiricalSample::from_draws(std::move(tr), seed, Quantity::Brt);
    return sim;
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov distance.

namespace detail {

// Tie-aware ECDF steps at sorted index i: value just before and at x_i.
inline std::pair<double, double> ecdf_steps(const std::vector<double>& v, std::size_t i) {
    const double n = static_cast<double>(v.size());
    const auto [lo, hi] = std::equal_range(v.begin(), v.end(), v[i]);
    return {static_cast<double>(lo - v.begin()) / n, static_cast<double>(hi - v.begin()) / n};
}

} // namespace detail

/// sup |F_n - F| evaluated on both sides of every sample point.
template <class Cdf>
double ks_distance(const EmpiricalSample& s, Cdf&& cdf) {
    if (s.values.empty()) throw DomainError("ks_distance: empty sample");
    const auto& v = s.values;
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        while (j + 1 < v.size() && v[j + 1] == v[i]) ++j;
        const double f = cdf(v[i]);
        d = std::max({d, static_cast<double>(j + 1) / n - f, f - static_cast<double>(i) / n});
        i = j + 1;
    }
    return d;
}

/// Same value as ks_distance for a nondecreasing cdf, but only evaluates cdf
/// where the deviation could still exceed the running maximum. Between two
/// evaluated points the cdf is bracketed by its endpoint values, which bounds
/// every deviation inside the interval.
template <class Cdf>
double ks_distance_monotone(const EmpiricalSample& s, Cdf&& cdf, std::size_t* evaluations = nullptr) {
    if (s.values.empty()) throw DomainError("ks_distance_monotone: empty sample");
    const auto& v = s.values;
    std::size_t evals = 0;
    double best = 0.0;
    auto eval = [&](std::size_t i) {
        const double f = cdf(v[i]);
        ++evals;
        const auto [before, at] = detail::ecdf_steps(v, i);
        best = std::max({best, at - f, f - before});
        return f;
    };
    struct Span {
        std::size_t lo, hi;
        double flo, fhi;
    };
    std::vector<Span> stack;
    const std::size_t last = v.size() - 1;
    const double f0 = eval(0);
    if (last > 0) stack.push_back({0, last, f0, eval(last)});
    while (!stack.empty()) {
        const Span sp = stack.back();
        stack.pop_back();
        if (sp.hi - sp.lo < 2) continue;
        const double before_lo = detail::ecdf_steps(v, sp.lo).first;
        const double at_hi = detail::ecdf_steps(v, sp.hi).second;
        const double bound = std::max(at_hi - sp.flo, sp.fhi - before_lo);
        if (bound <= best) continue;
        const std::size_t mid = sp.lo + (sp.hi - sp.lo) / 2;
        const double fm = eval(mid);
        stack.push_back({sp.lo, mid, sp.flo, fm});
        stack.push_back({mid, sp.hi, fm, sp.fhi});
    }
    if (evaluations) *evaluations = evals;
    return best;
}

// ---------------------------------------------------------------------------
// Raw moments with standard errors.

struct MomentEstimate {
    int order = 0;
    double value = 0.0;
    double std_error = 0.0;
};

/// Sample raw moments 1..n_max. For heavy-tailed samples (BRT at small N)
/// the standard error does not settle as the sample grows.
inline std::vector<MomentEstimate> empirical_moments(const std::vector<double>& values, int n_max) {
    if (n_max < 1) throw DomainError("empirical_moments: n_max must be >= 1");
    if (values.empty()) throw DomainError("empirical_moments: empty sample");
    const std::size_t count = values.size();
    std::vector<long double> s1(n_max + 1, 0.0L), s2(n_max + 1, 0.0L);
    for (double x : values) {
        long double p = 1.0L;
        for (int k = 1; k <= n_max; ++k) {
            p *= x;
            s1[k] += p;
            s2[k] += p * p;
        }
    }
    std::vector<MomentEstimate> out;
    for (int k = 1; k <= n_max; ++k) {
        const long double mean = s1[k] / count;
        long double var = count > 1 ? (s2[k] - count * mean * mean) / (count - 1) : 0.0L;
        if (var < 0.0L) var = 0.0L;
        out.push_back({k, static_cast<double>(mean), static_cast<double>(std::sqrt(var / count))});
    }
    return out;
}

inline std::vector<MomentEstimate> empirical_moments(const EmpiricalSample& s, int n_max) {
    return empirical_moments(s.values, n_max);
}

} // namespace rischarge::montecarlo
