#pragma once

// Meijer G-function for the two parameter shapes the BRT closed forms use:
//
//   G2012:  G^{2,0}_{1,2}( z | -; a  ;  b1, b2; - )
//   G2123:  G^{2,1}_{2,3}( z | 1; a+1 ;  b1+1, b2+1; 0 )   (= int_0^z G2012)
//
// Convention: G(z) = 1/(2 pi i) int prod Gamma(b_j + s) prod Gamma(1 - a_j - s)
//                    / (prod Gamma(1 - b_j - s) prod Gamma(a_j + s)) z^{-s} ds.
//
// Lower parameters may be a complex-conjugate pair; the function is real then.
// Everything is evaluated in log form because the fitted parameters for large
// N push the values far outside the double range.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "rischarge/error.hpp"
#include "rischarge/specfun.hpp"

namespace rischarge::specfun {

enum class MeijerShape { G2012, G2123 };

struct MeijerGSpec {
    MeijerShape shape = MeijerShape::G2012;
    std::vector<double> upper;
    std::vector<cplx> lower;

    /// G^{2,0}_{1,2}(z | a; b1, b2)
    static MeijerGSpec density(double a, cplx b1, cplx b2) {
        return {MeijerShape::G2012, {a}, {b1, b2}};
    }

    /// G^{2,1}_{2,3}(z | 1, a+1; b1+1, b2+1, 0), the running integral of density(a, b1, b2).
    static MeijerGSpec cumulative(double a, cplx b1, cplx b2) {
        return {MeijerShape::G2123, {1.0, a + 1.0}, {b1 + 1.0, b2 + 1.0, cplx{0.0, 0.0}}};
    }

    std::size_t m() const { return 2; }
    std::size_t n() const { return shape == MeijerShape::G2012 ? 0 : 1; }

    std::string describe() const {
        std::ostringstream os;
        os.precision(17);
        os << (shape == MeijerShape::G2012 ? "G2012" : "G2123") << "(upper=[";
        for (std::size_t i = 0; i < upper.size(); ++i) os << (i ? ", " : "") << upper[i];
        os << "], lower=[";
        for (std::size_t i = 0; i < lower.size(); ++i) os << (i ? ", " : "") << lower[i];
        os << "])";
        return os.str();
    }

    void validate() const {
        const std::size_t p = shape == MeijerShape::G2012 ? 1 : 2;
        const std::size_t q = shape == MeijerShape::G2012 ? 2 : 3;
        if (upper.size() != p || lower.size() != q) {
            throw DomainError("MeijerGSpec: parameter counts do not match the shape: " + describe());
        }
        for (double a : upper) {
            if (!std::isfinite(a)) throw DomainError("MeijerGSpec: non-finite parameter: " + describe());
        }
        for (const cplx& b : lower) {
            if (!std::isfinite(b.real()) || !std::isfinite(b.imag())) {
                throw DomainError("MeijerGSpec: non-finite parameter: " + describe());
            }
        }
        // A complex lower parameter needs its conjugate among the first m so the value is real.
        for (std::size_t i = 0; i < lower.size(); ++i) {
            if (lower[i].imag() == 0.0) continue;
            const bool paired = i < 2 && lower[1 - i] == std::conj(lower[i]);
            if (!paired) throw DomainError("MeijerGSpec: complex lower parameters must form a conjugate pair: " + describe());
        }
    }
};

enum class MeijerMethod { ResidueSeries, LaplaceQuadrature };

inline const char* to_string(MeijerMethod m) {
    return m == MeijerMethod::ResidueSeries ? "residue-series" : "laplace-quadrature";
}

struct MeijerGValue {
    double log_value;      // log of |G|
    MeijerMethod method;
    double error_estimate; // relative
    int sign = 1;          // G itself can be negative for a complex lower pair
};

namespace detail {

struct ReducedParams {
    double a;
    cplx b1;
    cplx b2;
};

inline ReducedParams reduce(const MeijerGSpec& spec) {
    spec.validate();
    if (spec.shape == MeijerShape::G2012) return {spec.upper[0], spec.lower[0], spec.lower[1]};
    if (spec.upper[0] != 1.0 || spec.lower[2] != cplx{0.0, 0.0}) {
        throw DomainError("meijer_g: only the integrated-density G2123 form (1, a+1; b1+1, b2+1, 0) is supported: " +
                          spec.describe());
    }
    return {spec.upper[1] - 1.0, spec.lower[0] - 1.0, spec.lower[1] - 1.0};
}

struct SeriesOutcome {
    bool ok = false;
    bool finite = false; // a value was produced, possibly with poor relative accuracy
    double log_value = 0.0;
    double error_estimate = 1.0;
    int sign = 1;
};

// Slater residue sum over the two left pole families s = -b_i - k.
// With integral = true every term t_k z^{b_i+k} is replaced by its running
// integral z^{b_i+k+1} / (b_i+k+1).
inline SeriesOutcome residue_series(const ReducedParams& p, double z, bool integral) {
    SeriesOutcome out;
    // Beyond this the two families cancel to far below double precision.
    if (z > 50.0) return out;
    const std::array<cplx, 2> b{p.b1, p.b2};
    const cplx d = b[0] - b[1];
    // Coincident (or nearly coincident) pole families: the residue sum is
    // ill-conditioned; the Laplace representation has no such problem.
    if (std::abs(d - std::round(d.real())) < 1e-9) return out;

    const double log_z = std::log(z);
    std::array<cplx, 2> log_prefix{};
    std::array<cplx, 2> sum{};
    std::array<double, 2> max_term{};
    std::array<bool, 2> active{};
    std::size_t total_terms = 0;

    for (int i = 0; i < 2; ++i) {
        const cplx bi = b[i];
        const cplx bj = b[1 - i];
        const cplx inv_gamma_arg = p.a - bi;
        // 1/Gamma(a - b_i) vanishes at its poles: the whole family drops out.
        if (inv_gamma_arg.imag() == 0.0 && is_nonpositive_integer(inv_gamma_arg.real())) continue;
        active[i] = true;
        log_prefix[i] = log_gamma(bj - bi) - log_gamma(inv_gamma_arg) + bi * log_z;
        if (integral) log_prefix[i] += log_z;

        cplx t{1.0, 0.0};
        cplx s = integral ? t / (bi + 1.0) : t;
        double biggest = std::abs(s);
        bool converged = false;
        constexpr int max_terms = 20000;
        for (int k = 0; k < max_terms; ++k) {
            const double kk = static_cast<double>(k);
            t *= (1.0 + bi - p.a + kk) / ((1.0 + bi - bj + kk) * (kk + 1.0)) * (-z);
            const cplx term = integral ? t / (bi + kk + 2.0) : t;
            s += term;
            const double mag = std::abs(term);
            biggest = std::max(biggest, mag);
            if (kk + 1.0 > z && mag <= 1e-17 * std::abs(s)) {
                converged = true;
                total_terms += static_cast<std::size_t>(k + 1);
                break;
            }
            if (!std::isfinite(mag)) return out;
        }
        if (!converged) return out;
        sum[i] = s;
        max_term[i] = biggest;
    }
    if (!active[0] && !active[1]) return out;

    double shift = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 2; ++i) {
        if (active[i]) shift = std::max(shift, log_prefix[i].real());
    }
    cplx total{0.0, 0.0};
    double magnitude = 0.0;
    for (int i = 0; i < 2; ++i) {
        if (!active[i]) continue;
        const cplx scale = std::exp(log_prefix[i] - shift);
        total += scale * sum[i];
        magnitude += std::abs(scale) * max_term[i];
    }
    const double value = total.real();
    if (!(value != 0.0) || !std::isfinite(value)) return out;
    const double loss = magnitude / std::abs(value);
    out.error_estimate = 4.0 * std::numeric_limits<double>::epsilon() * loss *
                         std::sqrt(static_cast<double>(total_terms + 1));
    out.finite = true;
    out.sign = value > 0.0 ? 1 : -1;
    out.log_value = shift + std::log(std::abs(value));
    // Accept when cancellation leaves at least ~10 correct digits.
    out.ok = out.error_estimate <= 1e-10;
    return out;
}

// The Laplace-type representation used by the quadrature fallback:
//   G2012(z | a; bl, bh) = z^bl e^-z / Gamma(alpha) int_0^inf e^{-zt} t^{alpha-1} (1+t)^{bl-a} dt,
// alpha = a - bh, Re(alpha) > 0. bh is the lower parameter with the larger real part.
struct LaplaceSetup {
    cplx alpha;
    cplx bl;
    cplx bh;
};

inline LaplaceSetup laplace_setup(const ReducedParams& p) {
    LaplaceSetup s{};
    if (p.b1.real() >= p.b2.real()) {
        s.bh = p.b1;
        s.bl = p.b2;
    } else {
        s.bh = p.b2;
        s.bl = p.b1;
    }
    s.alpha = p.a - s.bh;
    if (!(s.alpha.real() > 0.0)) {
        throw ConvergenceError("laplace-quadrature", std::numeric_limits<double>::infinity(),
                               "meijer_g: residue series unusable and a <= Re(b) rules out the quadrature fallback");
    }
    return s;
}

// Locates [lo, hi] around the maximum of a real log-envelope so that outside
// it the integrand is below exp(-drop) relative to the peak.
template <class Envelope>
inline std::array<double, 3> bracket_peak(Envelope env, double start, double drop) {
    // coarse scan for the peak, widening geometrically
    double best_u = start;
    double best = env(start);
    for (double step : {8.0, 2.0, 0.5, 0.125}) {
        bool moved = true;
        while (moved) {
            moved = false;
            for (double cand : {best_u - step, best_u + step}) {
                const double v = env(cand);
                if (v > best) {
                    best = v;
                    best_u = cand;
                    moved = true;
                }
            }
        }
    }
    auto walk = [&](double dir) {
        double step = 0.25;
        double u = best_u;
        for (int i = 0; i < 200; ++i) {
            u += dir * step;
            if (env(u) < best - drop) return u;
            step = std::min(step * 1.5, 16.0);
        }
        return u;
    };
    return {walk(-1.0), walk(+1.0), best};
}

// term_scale is the size of the largest term summed inside the integrand's
// exponent; round-off there, eps * term_scale, is the accuracy floor, and
// asking for less makes the adaptive rule subdivide without end.
template <class F>
inline cplx gk_integrate(F f, double lo, double hi, double* err_out, double term_scale = 1.0) {
    double err = 0.0;
    double l1 = 0.0;
    const double tol = std::max(1e-13, 16.0 * std::numeric_limits<double>::epsilon() * term_scale);
    const cplx r = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 20, tol, &err, &l1);
    if (err_out) *err_out = l1 > 0.0 ? err / l1 : err;
    return r;
}

// log |v| and sign of v for a value known to be real, given log v.
inline std::pair<double, int> real_log_of(cplx log_value, const char* what) {
    const double c = std::cos(log_value.imag());
    if (!(std::abs(c) > 0.999999)) {
        throw ConvergenceError("laplace-quadrature", std::abs(std::sin(log_value.imag())),
                               std::string("meijer_g: ") + what + " did not produce a real value");
    }
    return {log_value.real() + std::log(std::abs(c)), c > 0.0 ? 1 : -1};
}

inline MeijerGValue laplace_density(const ReducedParams& p, double z) {
    const LaplaceSetup s = laplace_setup(p);
    const double ar = s.alpha.real();
    const double cr = (s.bl - p.a).real();
    auto env = [&](double u) { return ar * u - z * std::exp(u) + cr * std::log1p(std::exp(u)); };
    const auto [lo, hi, peak] = bracket_peak(env, std::log(std::max(ar, 1e-3) / z), 60.0);
    auto f = [&](double u) {
        return std::exp(s.alpha * u - z * std::exp(u) + (s.bl - p.a) * std::log1p(std::exp(u)) - peak);
    };
    const double um = std::max(std::abs(lo), std::abs(hi));
    const double scale = std::abs(s.alpha) * um + z * std::exp(hi) + std::abs(s.bl - p.a) * (um + 1.0);
    double rel_err = 0.0;
    const cplx integral = gk_integrate(f, lo, hi, &rel_err, scale);
    const cplx log_g = s.bl * std::log(z) - z - log_gamma(s.alpha) + peak + std::log(integral);
    const auto [lv, sign] = real_log_of(log_g, "density quadrature");
    return {lv, MeijerMethod::LaplaceQuadrature, std::max(rel_err, 1e-14), sign};
}

// Running integral F(z) = int_0^z G2012. Uses
//   F(z) = 1/Gamma(alpha) int t^{alpha-1} (1+t)^{-a-1} gamma(bl+1, z(1+t)) dt
// or, when the upper tail is small, total - the same integral with Gamma(bl+1, .).
inline MeijerGValue laplace_integral(const ReducedParams& p, double z) {
    const LaplaceSetup s = laplace_setup(p);
    const cplx c = s.bl + 1.0;
    const cplx log_total = log_gamma(s.bl + 1.0) + log_gamma(s.bh + 1.0) - log_gamma(cplx{p.a + 1.0, 0.0});

    auto run = [&](bool upper) -> std::pair<cplx, double> {
        // the upper branch carries a factor e^-z, taken out analytically so
        // that the integrand logs stay O(1) and the quadrature is not fed
        // round-off from values near -z
        auto log_inc = [&](double u) {
            const double eu = std::exp(u);
            const double x = z * (1.0 + eu);
            return upper ? log_upper_gamma_scaled(c, x) - z * eu : log_lower_gamma(c, x);
        };
        auto log_integrand = [&](double u) {
            return s.alpha * u - (p.a + 1.0) * std::log1p(std::exp(u)) + log_inc(u);
        };
        auto env = [&](double u) { return log_integrand(u).real(); };
        const auto [lo, hi, peak] = bracket_peak(env, std::log(std::max(s.alpha.real(), 1e-3) / z), 60.0);
        auto f = [&](double u) { return std::exp(log_integrand(u) - peak); };
        const double um = std::max(std::abs(lo), std::abs(hi));
        const double xm = z * (1.0 + std::exp(hi));
        const double scale = std::abs(s.alpha) * um + std::abs(p.a + 1.0) * (um + 1.0) + std::abs(c) * std::abs(std::log(xm)) +
                             (upper ? z * std::exp(hi) : xm);
        double rel_err = 0.0;
        const cplx integral = gk_integrate(f, lo, hi, &rel_err, scale);
        return {peak + std::log(integral) - log_gamma(s.alpha) - (upper ? z : 0.0), rel_err};
    };

    auto [log_tail, err_tail] = run(true);
    const cplx ratio = std::exp(log_tail - log_total);
    if (std::abs(ratio) < 0.5) {
        const cplx log_f = log_total + std::log(1.0 - ratio);
        const double amplification = 1.0 / std::max(1e-300, std::abs(1.0 - ratio));
        const auto [lv, sign] = real_log_of(log_f, "integral quadrature");
        return {lv, MeijerMethod::LaplaceQuadrature, std::max(err_tail * std::abs(ratio) * amplification, 1e-14), sign};
    }
    auto [log_f, err_f] = run(false);
    const auto [lv, sign] = real_log_of(log_f, "integral quadrature");
    return {lv, MeijerMethod::LaplaceQuadrature, std::max(err_f, 1e-14), sign};
}

} // namespace detail

/// Primary evaluation: residue series where it is well conditioned, Laplace
/// quadrature otherwise. Returns the log of the function value.
inline MeijerGValue meijer_g_eval(const MeijerGSpec& spec, double z) {
    if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("meijer_g: z must be positive and finite");
    const detail::ReducedParams p = detail::reduce(spec);
    const bool integral = spec.shape == MeijerShape::G2123;
    if (integral && !(std::min(p.b1.real(), p.b2.real()) + 1.0 > 0.0)) {
        throw DomainError("meijer_g: G2123 requires Re(b) > 0 for its defining integral: " + spec.describe());
    }
    const detail::SeriesOutcome series = detail::residue_series(p, z, integral);
    if (series.ok) return {series.log_value, MeijerMethod::ResidueSeries, series.error_estimate, series.sign};
    try {
        return integral ? detail::laplace_integral(p, z) : detail::laplace_density(p, z);
    } catch (const ConvergenceError&) {
        // near a sign change neither route keeps relative accuracy; the
        // series value is still accurate in absolute terms
        if (series.finite) return {series.log_value, MeijerMethod::ResidueSeries, series.error_estimate, series.sign};
        throw;
    }
}

/// log G for a positive value. Throws DomainError where G is negative,
/// which happens near zero when the lower parameters are a complex pair.
inline double log_meijer_g(const MeijerGSpec& spec, double z) {
    const MeijerGValue v = meijer_g_eval(spec, z);
    if (v.sign < 0) throw DomainError("log_meijer_g: value is negative at this argument: " + spec.describe());
    return v.log_value;
}

/// sign * exp(log|G| + log_scale), with an overflow check.
inline double signed_exp(const MeijerGValue& v, double log_scale = 0.0) {
    const double lv = v.log_value + log_scale;
    if (lv > std::log(std::numeric_limits<double>::max())) {
        throw OverflowError("meijer_g: value exceeds double range (use log_meijer_g)");
    }
    return v.sign * std::exp(lv);
}

inline double meijer_g(const MeijerGSpec& spec, double z) { return signed_exp(meijer_g_eval(spec, z)); }

// ---------------------------------------------------------------------------
// Mellin-Barnes oracle: trapezoidal quadrature of the defining contour
// integral along Re(s) = c. The trapezoid rule converges geometrically for
// integrands analytic in a strip, which the vertical line is by construction.

struct MellinBarnesOptions {
    double step_scale = 1.0;    // multiplies the trapezoid step
    double tail_cutoff = 1e-18; // relative magnitude at which the sum is truncated
};

class ContourError : public ConvergenceError {
public:
    ContourError(const std::string& what) : ConvergenceError("mellin-barnes", 0.0, what) {}
};

namespace detail {

inline cplx mb_log_integrand(const MeijerGSpec& spec, cplx s, double log_z) {
    const std::size_t m = spec.m();
    const std::size_t n = spec.n();
    cplx acc = -s * log_z;
    for (std::size_t j = 0; j < spec.lower.size(); ++j) {
        if (j < m) acc += log_gamma(spec.lower[j] + s);
        else acc -= log_gamma(1.0 - spec.lower[j] - s);
    }
    for (std::size_t j = 0; j < spec.upper.size(); ++j) {
        if (j < n) acc += log_gamma(cplx{1.0 - spec.upper[j], 0.0} - s);
        else acc -= log_gamma(cplx{spec.upper[j], 0.0} + s);
    }
    return acc;
}

} // namespace detail

inline double log_mellin_barnes_oracle(const MeijerGSpec& spec, double z, const MellinBarnesOptions& opt = {}) {
    spec.validate();
    if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("mellin_barnes_oracle: z must be positive and finite");
    const double log_z = std::log(z);
    double lo = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < spec.m(); ++j) lo = std::max(lo, -spec.lower[j].real());
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < spec.n(); ++j) hi = std::min(hi, 1.0 - spec.upper[j]);
    if (!(hi > lo)) {
        throw ContourError("mellin_barnes_oracle: pole families overlap, no separating contour for " + spec.describe());
    }

    auto phi = [&](double c) { return detail::mb_log_integrand(spec, cplx{c, 0.0}, log_z).real(); };
    const double margin = std::isinf(hi) ? 0.5 : std::min(0.5, 0.25 * (hi - lo));
    double left = lo + margin;
    double right = std::isinf(hi) ? lo + margin + 2.0 * z + 50.0 + 4.0 * std::abs(lo) : hi - margin;
    // golden-section minimisation of the real-axis log-modulus (saddle point)
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = right - g * (right - left);
    double x2 = left + g * (right - left);
    double f1 = phi(x1);
    double f2 = phi(x2);
    for (int it = 0; it < 200 && right - left > 1e-6; ++it) {
        if (f1 < f2) {
            right = x2;
            x2 = x1;
            f2 = f1;
            x1 = right - g * (right - left);
            f1 = phi(x1);
        } else {
            left = x1;
            x1 = x2;
            f1 = f2;
            x2 = left + g * (right - left);
            f2 = phi(x2);
        }
    }
    const double c = 0.5 * (left + right);
    const double peak = phi(c);
    const double strip = std::min(c - lo, hi - c);
    const double h = opt.step_scale * std::min(0.25, strip / 8.0);

    auto f = [&](double t) { return std::exp(detail::mb_log_integrand(spec, cplx{c, t}, log_z) - peak); };
    cplx sum = f(0.0);
    double biggest = std::abs(sum);
    const long quiet_needed = static_cast<long>(std::ceil(4.0 / h));
    long quiet = 0;
    long k = 1;
    constexpr long max_nodes = 20000000;
    for (; k < max_nodes && quiet < quiet_needed; ++k) {
        const double t = static_cast<double>(k) * h;
        const cplx fp = f(t);
        const cplx fm = f(-t);
        sum += fp + fm;
        const double mag = std::max(std::abs(fp), std::abs(fm));
        biggest = std::max(biggest, mag);
        quiet = mag < opt.tail_cutoff * biggest ? quiet + 1 : 0;
    }
    if (k >= max_nodes) {
        throw ConvergenceError("mellin-barnes", 1.0, "mellin_barnes_oracle: integrand did not decay for " + spec.describe());
    }
    const double value = sum.real() * h / (2.0 * std::numbers::pi);
    if (!(value > 0.0)) {
        throw ConvergenceError("mellin-barnes", std::abs(sum.imag()),
                               "mellin_barnes_oracle: non-positive result for " + spec.describe());
    }
    return peak + std::log(value);
}

inline double mellin_barnes_oracle(const MeijerGSpec& spec, double z, const MellinBarnesOptions& opt = {}) {
    const double lv = log_mellin_barnes_oracle(spec, z, opt);
    if (lv > std::log(std::numeric_limits<double>::max())) {
        throw OverflowError("mellin_barnes_oracle: value exceeds double range: " + spec.describe());
    }
    return std::exp(lv);
}

} // namespace rischarge::specfun
