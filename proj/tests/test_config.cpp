#include <complex>

#include "doctest.h"
#include "drk/config.hpp"

using namespace drk;

TEST_CASE("config round trip is lossless") {
    RunConfig c;
    c.m = 4;
    c.k = 3;
    c.instance = "quaternionic:1";
    c.r_min = 0.1 / 3.0;
    c.r_max = 27.5;
    c.r_steps = 17;
    c.taus = {{1.0, 0.0}, {0.1, -2.0 / 3.0}, {0.0, 1e-7}};
    c.t_min = 0.03;
    c.t_max = 1e3;
    c.t_steps = 9;
    c.s_max = 42.0;
    c.quad_tol = 3e-11;
    c.ode_tol = 1e-13;
    c.fit_tol = 0.01;
    c.output_dir = "out";
    c.csv = "a.csv";
    c.json = "a.json";
    c.threads = 2;
    const RunConfig back = parse_config(to_ini(c));
    CHECK(back == c);
    CHECK(parse_config(to_ini(RunConfig{})) == RunConfig{});
}

TEST_CASE("config parsing") {
    const auto c = parse_config("[space]\nm = 4\nk = 2\n[grids]\ntaus = 1, 0.5:2\n");
    CHECK(c.m == 4);
    CHECK(c.k == 2);
    REQUIRE(c.taus.size() == 2);
    CHECK(c.taus[1] == std::complex<double>(0.5, 2.0));
    CHECK(c.r_max == RunConfig{}.r_max);  // untouched keys keep defaults

    CHECK_THROWS_AS(parse_config("[space]\nmm = 2\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("[spaces]\nm = 2\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("[space]\nm = two\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("[space]\nm = 3\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("[space]\nk = 1.5\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("[tolerances]\nquad = 0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("[grids]\nr_min = 2\nr_max = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("[grids]\ntaus = -1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("[grids]\ntaus =\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("[grids]\nt_steps = 0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("[space\nm = 2\n"), std::invalid_argument);
    CHECK_THROWS_AS(load_config("/nonexistent/drk.ini"), std::invalid_argument);
}
