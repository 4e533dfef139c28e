#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "rischarge/montecarlo.hpp"
#include "support.hpp"

using namespace rischarge;
using namespace rischarge::montecarlo;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

power::ScenarioConfig scenario(int n) {
    power::ScenarioConfig c;
    c.ps_watts = power::dbm_to_watts(15.0);
    c.channel.n_elements = n;
    return c;
}

bool within_3se(const MomentEstimate& m, double expected) { return std::abs(m.value - expected) <= 3.0 * m.std_error; }

} // namespace

TEST_CASE("counter-keyed generator") {
    CounterRng a(1, 2, 0), b(1, 2, 0), c(1, 3, 0), d(1, 2, 1);
    const auto x = a.next();
    CHECK(x == b.next());
    CHECK(x != c.next());
    CHECK(x != d.next());
    CounterRng u(9, 0);
    for (int i = 0; i < 100000; ++i) {
        const double v = u.uniform_open();
        REQUIRE(v > 0.0);
        REQUIRE(v <= 1.0);
    }
}

TEST_CASE("Rayleigh draws have mean sqrt(pi/2)") {
    std::vector<double> r(1000000);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = CounterRng(5, i).rayleigh();
    const auto m = empirical_moments(r, 2);
    CHECK(within_3se(m[0], std::sqrt(pi / 2)));
    CHECK(within_3se(m[1], 2.0));
}

TEST_CASE("gain draws are a pure function of (seed, trial)") {
    const channel::ChannelConfig cfg{6, 1.0};
    CHECK(sample_gain(cfg, 12345, 77) == sample_gain(cfg, 12345, 77));
    CHECK(sample_gain(cfg, 12345, 77) != sample_gain(cfg, 12346, 77));
    CHECK(sample_gain(cfg, 12345, 77) != sample_gain(cfg, 12345, 78));
    const auto serial = draw_gains(cfg, 0, 50000, 4, 1);
    const auto parallel = draw_gains(cfg, 0, 50000, 4, 4);
    CHECK(serial == parallel);
    const auto tail = draw_gains(cfg, 20000, 100, 4, 1);
    for (std::size_t i = 0; i < tail.size(); ++i) CHECK(tail[i] == serial[20000 + i]);
}

TEST_CASE("simulate: reproducibility, sorting and T * P = alpha") {
    const auto c = scenario(4);
    const brt::BatteryProfile bat{};
    const double alpha = brt::conversion_coefficient(bat);
    const auto s1 = simulate(c, bat, 100000, 9, 1);
    const auto s3 = simulate(c, bat, 100000, 9, 3);
    CHECK(s1.power.values == s3.power.values);
    CHECK(s1.brt.values == s3.brt.values);
    CHECK(std::is_sorted(s1.power.values.begin(), s1.power.values.end()));
    CHECK(std::is_sorted(s1.brt.values.begin(), s1.brt.values.end()));
    CHECK(s1.brt.trials == 100000);
    CHECK(s1.brt.quantity == Quantity::Brt);
    const std::size_t n = s1.power.values.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(s1.brt.values[i] * s1.power.values[n - 1 - i] / alpha - 1));
    CHECK(worst <= 1e-15);
    CHECK_THROWS_AS(simulate(c, bat, 0, 9, 1), DomainError);
}

TEST_CASE("simulated received power has mean Pbar mu2") {
    const auto c = scenario(4);
    const auto s = simulate(c, brt::BatteryProfile{}, 1000000, 31, 1);
    std::vector<double> ratio(s.power.values);
    const double pbar = power::avg_received_power(c);
    for (double& v : ratio) v /= pbar;
    CHECK(within_3se(empirical_moments(ratio, 1)[0], channel::gain_moments(c.channel).mu2));
}

TEST_CASE("empirical gain moments match the closed forms within 3 s.e.") {
    for (int n : {1, 2, 4, 8}) {
        const channel::ChannelConfig cfg{n, 1.0};
        const auto m = channel::gain_moments(cfg);
        const auto e = empirical_moments(simulate_gain(cfg, 1000000, 2024, 1), 4);
        const double expected[4] = {m.mu1, m.mu2, m.mu3, m.mu4};
        for (int k = 0; k < 4; ++k) {
            INFO("N=" << n << " order " << k + 1 << " z=" << (e[k].value - expected[k]) / e[k].std_error);
            CHECK(within_3se(e[k], expected[k]));
        }
    }
    const auto e2 = empirical_moments(simulate_gain({2, 1.0}, 1000000, 2024, 1), 3);
    CHECK(within_3se(e2[2], 21 * pi));
}

TEST_CASE("empirical moments of a constant sample are exact") {
    const std::vector<double> v(1000, 1.5);
    const auto m = empirical_moments(v, 4);
    for (int k = 0; k < 4; ++k) {
        CHECK(m[k].value == std::pow(1.5, k + 1));
        CHECK(m[k].std_error == Approx(0.0).margin(1e-12));
    }
    CHECK_THROWS_AS(empirical_moments(v, 0), DomainError);
}

TEST_CASE("single-element BRT mean does not settle: standard error is a divergence witness") {
    const auto c = scenario(1);
    const double scale = brt::conversion_coefficient({}) / power::avg_received_power(c);
    const auto gains = draw_gains(c.channel, 0, 1000000, 55, 1);
    auto se_of_prefix = [&](std::size_t count) {
        std::vector<double> t(count);
        for (std::size_t i = 0; i < count; ++i) t[i] = scale / (gains[i] * gains[i]);
        return empirical_moments(t, 1)[0].std_error;
    };
    const double se4 = se_of_prefix(10000), se5 = se_of_prefix(100000), se6 = se_of_prefix(1000000);
    INFO("se at 1e4, 1e5, 1e6: " << se4 << ", " << se5 << ", " << se6);
    // finite variance would shrink the s.e. by sqrt(10) per decade
    CHECK(se5 > se4 / std::sqrt(10.0) * 2.0);
    CHECK(se6 > se5 / std::sqrt(10.0) * 2.0);

    // control: N = 8 has finite BRT variance and the s.e. falls as 1/sqrt(n)
    const auto c8 = scenario(8);
    const auto g8 = draw_gains(c8.channel, 0, 1000000, 55, 1);
    auto se8 = [&](std::size_t count) {
        std::vector<double> t(count);
        for (std::size_t i = 0; i < count; ++i) t[i] = 1.0 / (g8[i] * g8[i]);
        return empirical_moments(t, 1)[0].std_error;
    };
    CHECK(se8(1000000) / se8(10000) == Approx(0.1).epsilon(0.3));
}

TEST_CASE("KS distance") {
    SECTION("one point at the median") {
        EmpiricalSample s = EmpiricalSample::from_draws({1.0}, 0, Quantity::Gain);
        auto cdf = [](double x) { return 1.0 - std::exp(-x * std::log(2.0)); };
        CHECK(ks_distance(s, cdf) == Approx(0.5).epsilon(1e-12));
        CHECK(ks_distance_monotone(s, cdf) == Approx(0.5).epsilon(1e-12));
    }
    SECTION("sample from the reference law stays under the Kolmogorov bound") {
        std::vector<double> v(1000000);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = -std::log(CounterRng(8, i).uniform_open());
        const auto s = EmpiricalSample::from_draws(std::move(v), 8, Quantity::Power);
        auto cdf = [](double x) { return -std::expm1(-x); };
        CHECK(ks_distance(s, cdf) <= 0.0017);
    }
    SECTION("branch and bound equals the exhaustive value with far fewer evaluations") {
        const channel::ChannelConfig cfg{4, 1.0};
        const auto p = channel::fit_approximant(cfg);
        const auto s = simulate_gain(cfg, 100000, 3, 1);
        std::size_t evals = 0;
        const double fast = ks_distance_monotone(s, [&](double x) { return channel::gain_cdf(x, p); }, &evals);
        const double slow = ks_distance(s, [&](double x) { return channel::gain_cdf(x, p); });
        CHECK(fast == slow);
        CHECK(evals < s.values.size() / 5);
    }
    SECTION("ties are handled on both sides of the step") {
        const auto s = EmpiricalSample::from_draws({0.5, 0.5, 0.5, 0.5}, 0, Quantity::Gain);
        auto cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
        CHECK(ks_distance(s, cdf) == Approx(0.5));
        CHECK(ks_distance_monotone(s, cdf) == Approx(0.5));
    }
    CHECK_THROWS_AS(ks_distance(EmpiricalSample{}, [](double) { return 0.0; }), DomainError);
}

TEST_CASE("ecdf") {
    const auto s = EmpiricalSample::from_draws({3.0, 1.0, 2.0, 2.0}, 0, Quantity::Gain);
    CHECK(s.values == std::vector<double>{1.0, 2.0, 2.0, 3.0});
    CHECK(s.ecdf(0.5) == 0.0);
    CHECK(s.ecdf(2.0) == 0.75);
    CHECK(s.ecdf(10.0) == 1.0);
}
