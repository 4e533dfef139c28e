#include <catch_amalgamated.hpp>

#include "rischarge/config.hpp"

using namespace rischarge;
using namespace rischarge::config;
using Catch::Approx;

TEST_CASE("defaults follow the standard parameter table") {
    const RunConfig c;
    CHECK(c.eta == 0.5);
    CHECK(c.d1_frac == 0.5);
    CHECK(c.d2_frac == 0.5);
    CHECK(c.delta == 2.7);
    CHECK(c.cb_mah == 10.0);
    CHECK(c.dd == 0.4);
    CHECK(c.vb == 1.2);
    CHECK(c.d_tot == 5.0);
    CHECK(c.precision == 9);
    CHECK(c.scenario().d1 == 2.5);
    CHECK(brt::conversion_coefficient(c.battery()) == Approx(9.6e-3));
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("parse, serialize, parse round trip") {
    RunConfig c;
    c.ps_dbm = 17.25;
    c.n = 12;
    c.d1_frac = 0.3;
    c.d2_frac = 0.7;
    c.delta = 2.1;
    c.cb_mah = 33.3;
    c.trials = 12345;
    c.seed = 18446744073709551557ULL;
    c.grid = {0.1, 7.5, 42, GridScale::Linear};
    c.precision = 12;
    c.out = "some/file.csv";
    const RunConfig back = parse(serialize(c));
    CHECK(back == c);
    CHECK(parse(serialize(back)) == back);
    CHECK(serialize(parse(serialize(c))) == serialize(c));
}

TEST_CASE("parser details") {
    const auto c = parse("# comment\n\n  n = 7   # trailing\nps_dbm=30\r\ngrid_scale = linear\n");
    CHECK(c.n == 7);
    CHECK(c.ps_dbm == 30.0);
    CHECK(c.grid.scale == GridScale::Linear);
    CHECK_THROWS_AS(parse("bogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("n = seven\n"), ConfigError);
    CHECK_THROWS_AS(parse("n 7\n"), ConfigError);
    CHECK_THROWS_AS(parse("grid_scale = cubic\n"), ConfigError);
    CHECK_THROWS_AS(parse("n = 4.5\n"), ConfigError);
}

TEST_CASE("validation") {
    RunConfig c;
    c.precision = 5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RunConfig{};
    c.grid.min = 2.0;
    c.grid.max = 1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RunConfig{};
    c.grid.points = 1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RunConfig{};
    c.grid.min = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.grid.scale = GridScale::Linear;
    CHECK_NOTHROW(c.validate());
    c = RunConfig{};
    c.dd = 1.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RunConfig{};
    c.n = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("grids") {
    const GridSpec lin{0.0, 1.0, 5, GridScale::Linear};
    CHECK(lin.values() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    const GridSpec lg{1e-2, 1e2, 5, GridScale::Log};
    const auto v = lg.values();
    CHECK(v.front() == 1e-2);
    CHECK(v.back() == 1e2);
    CHECK(v[2] == Approx(1.0));
}
