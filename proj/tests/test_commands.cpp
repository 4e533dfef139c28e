#include <catch_amalgamated.hpp>

#include <clocale>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rischarge/commands.hpp"

using namespace rischarge;
using namespace rischarge::cli;
using Catch::Approx;

namespace {

RunConfig small(int n, std::uint64_t trials = 20000) {
    RunConfig c;
    c.n = n;
    c.trials = trials;
    return c;
}

double trapezoid(const Table& t, std::size_t col) {
    double s = 0.0;
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
        const double x0 = *t.rows[i - 1][0], x1 = *t.rows[i][0];
        s += 0.5 * (x1 - x0) * (*t.rows[i - 1][col] + *t.rows[i][col]);
    }
    return s;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<double> column(const Table& t, const std::string& name) {
    const auto i = t.column(name);
    std::vector<double> v;
    for (const auto& r : t.rows) v.push_back(r[i] ? *r[i] : std::nan(""));
    return v;
}

} // namespace

TEST_CASE("number formatting is locale independent with fixed significant digits") {
    std::setlocale(LC_ALL, "de_DE.UTF-8"); // may be unavailable, harmless then
    CHECK(output::format_number(0.1234567891234, 9) == "0.123456789");
    CHECK(output::format_number(1234.5, 6) == "1234.5");
    CHECK(output::format_number(1.5e-7, 6) == "1.5e-07");
    CHECK(output::format_number(std::numeric_limits<double>::infinity(), 9) == "inf");
    std::setlocale(LC_ALL, "C");
}

TEST_CASE("csv layout") {
    Table t;
    t.header = {"a", "b"};
    t.rows = {{1.0, std::nullopt}, {2.5, 3.0}};
    CHECK(t.to_csv(6) == "a,b\n1,\n2.5,3\n");
}

TEST_CASE("histogram uses at least 50 bins and integrates to the covered mass") {
    std::vector<double> v;
    for (int i = 0; i < 100000; ++i) v.push_back((i + 0.5) / 100000.0);
    const output::Histogram h(v, 0.0, 1.0);
    CHECK(h.bins() >= 50);
    double mass = 0.0;
    for (std::size_t b = 0; b < h.bins(); ++b) mass += h((b + 0.5) * h.width()) * h.width();
    CHECK(mass == Approx(1.0).epsilon(1e-12));
    const output::Histogram wide(v, 0.0, 2.0);
    CHECK(wide(1.5) == 0.0);
}

TEST_CASE("gain pdf on [0, 10] for N=1 integrates to one") {
    RunConfig c = small(1);
    c.grid = {0.0, 10.0, 2001, config::GridScale::Linear};
    const auto t = distribution_table(c, Target::Gain, {Variant::Exact, Variant::N1}, false);
    CHECK(t.header == std::vector<std::string>{"x", "exact", "n1"});
    CHECK(t.rows.size() == 2001);
    CHECK(trapezoid(t, 1) == Approx(1.0).margin(1e-3));
    CHECK(trapezoid(t, 2) == Approx(1.0).margin(1e-3));
}

TEST_CASE("variant checks") {
    CHECK_THROWS_AS(distribution_table(small(4), Target::Brt, {Variant::N1}, false), ConfigError);
    CHECK_THROWS_AS(distribution_table(small(4), Target::Brt, {}, false), ConfigError);
    CHECK_THROWS_AS(parse_variant("bogus"), ConfigError);
    CHECK_THROWS_AS(parse_target("bogus"), ConfigError);
    CHECK_THROWS_AS(parse_axis("bogus"), ConfigError);
    const auto t = distribution_table(small(4), Target::Brt, {Variant::Exact, Variant::Exact, Variant::Clt}, true);
    CHECK(t.header == std::vector<std::string>{"x", "exact", "clt"});
}

TEST_CASE("empirical output is byte-identical for a fixed seed") {
    RunConfig c = small(4);
    const auto pbar = power::avg_received_power(c.scenario());
    c.grid = {0.5 * pbar, 60 * pbar, 100, config::GridScale::Linear};
    const auto a = distribution_table(c, Target::Power, {Variant::Exact, Variant::Empirical}, false).to_csv(9);
    const auto b = distribution_table(c, Target::Power, {Variant::Exact, Variant::Empirical}, false).to_csv(9);
    CHECK(a == b);
    const auto cdf = distribution_table(c, Target::Power, {Variant::Empirical}, true);
    const auto col = column(cdf, "empirical");
    CHECK(std::is_sorted(col.begin(), col.end()));
}

TEST_CASE("sweep table") {
    SECTION("header and undefined cells") {
        std::vector<std::string> errors;
        const auto t = sweep_table(small(4), Axis::N, {1, 2, 4}, &errors);
        CHECK(t.header == sweep_header());
        CHECK(errors.empty());
        CHECK_FALSE(t.rows[0][1].has_value()); // N=1 mean diverges
        CHECK(t.rows[1][1].has_value());       // N=2 mean exists
        CHECK_FALSE(t.rows[1][3].has_value()); // N=2 variance diverges
        CHECK(t.rows[2][6].has_value());
        const std::string csv = t.to_csv(9);
        CHECK(csv.rfind("axis_value,mean_hr,mean_clt_hr,variance,skewness,kurtosis,aof,mc_mean_hr,mc_se,ks\n", 0) == 0);
        CHECK(csv.find("1,,") != std::string::npos);
    }
    SECTION("row errors do not stop the run") {
        std::vector<std::string> errors;
        const auto t = sweep_table(small(4), Axis::D1Frac, {0.5, 1.5, 0.25}, &errors);
        CHECK(errors.size() == 1);
        CHECK(t.rows.size() == 3);
        CHECK(t.rows[2][1].has_value());
    }
    SECTION("battery capacity: mean increases") {
        for (int n : {5, 10, 20}) {
            RunConfig c = small(n);
            c.ps_dbm = 20;
            const auto mean = column(sweep_table(c, Axis::CbMah, {5, 10, 20, 40}), "mean_hr");
            CHECK(std::is_sorted(mean.begin(), mean.end()));
            CHECK(std::adjacent_find(mean.begin(), mean.end()) == mean.end());
        }
    }
    SECTION("placement: mean is largest mid-way and symmetric") {
        RunConfig c = small(10);
        c.ps_dbm = 20;
        const std::vector<double> fracs = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
        const auto mean = column(sweep_table(c, Axis::D1Frac, fracs), "mean_hr");
        CHECK(std::max_element(mean.begin(), mean.end()) - mean.begin() == 4);
        for (std::size_t i = 0; i < 4; ++i) CHECK(mean[i] == Approx(mean[8 - i]).epsilon(1e-9));
    }
    SECTION("transmit power: approximant and large-N means converge as N grows") {
        // the gap is about 28% at N=8 and 15% at N=16, so the means only meet for large N
        double prev = 1.0;
        for (int n : {8, 16, 32, 64}) {
            const auto t = sweep_table(small(n, 1000), Axis::PsDbm, {10, 20, 30});
            const auto m = column(t, "mean_hr"), mc = column(t, "mean_clt_hr");
            const double gap = std::abs(m[1] / mc[1] - 1);
            CHECK(gap < prev);
            for (std::size_t i = 0; i < m.size(); ++i) CHECK(std::abs(m[i] / mc[i] - 1) == Approx(gap).epsilon(1e-9));
            prev = gap;
        }
    }
}

TEST_CASE("mc-validate report") {
    SECTION("N=4 default scenario passes") {
        const auto j = mc_validate(small(4, 1000000));
        CHECK(j["ks_brt"].get<double>() <= 0.01);
        CHECK(j["status"] == "pass");
        std::vector<std::string> keys;
        for (const auto& [k, v] : j.items()) keys.push_back(k);
        CHECK(keys[0] == "n");
        CHECK(keys[1] == "trials");
        CHECK(keys[2] == "seed");
    }
    SECTION("tiny runs are inconclusive") {
        const auto j = mc_validate(small(4, 100));
        CHECK(j["status"] == "inconclusive");
    }
    SECTION("N=1 flags divergent BRT moments") {
        const auto j = mc_validate(small(1, 20000));
        int undefined = 0;
        for (const auto& row : j["moments"]) {
            if (row["quantity"] == "brt") {
                CHECK(row["status"] == "undefined (divergent)");
                ++undefined;
            }
        }
        CHECK(undefined == 4);
    }
}

TEST_CASE("figure presets write their files") {
    const auto dir = std::filesystem::temp_directory_path() / "rischarge_fig_test";
    std::filesystem::remove_all(dir);
    RunConfig c;
    c.trials = 20000;
    SECTION("fig1: six-column families") {
        const auto files = run_figure(1, c, dir);
        REQUIRE(files.size() == 3);
        const std::string analytic = slurp(files[0]);
        CHECK(analytic.substr(0, analytic.find('\n')) == "tau_hr,N4,N6,N8,N10,N50");
        CHECK(slurp(files[1]).rfind("tau_hr,N10_clt,N50_clt\n", 0) == 0);
        CHECK(slurp(files[2]).rfind("tau_hr,N4,N6,N8,N10,N50\n", 0) == 0);
    }
    SECTION("fig7 starts at the first N with a defined AoF") {
        const auto files = run_figure(7, c, dir);
        REQUIRE(files.size() == 1);
        const std::string text = slurp(files[0]);
        CHECK(text.rfind("n,aof,mc_aof,siso_power_aof\n3,", 0) == 0);
    }
    SECTION("every preset runs") {
        for (int k : {2, 3, 4, 5, 6}) CHECK_FALSE(run_figure(k, c, dir).empty());
        CHECK_THROWS_AS(run_figure(8, c, dir), ConfigError);
    }
    std::filesystem::remove_all(dir);
}
