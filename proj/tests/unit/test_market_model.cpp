// SPDX-License-Identifier: MIT
#include "nlbs/error.hpp"
#include "nlbs/market_model.hpp"

#include "doctest.h"

#include <cmath>

using namespace nlbs;

namespace {

Scenario base_scenario() {
    Scenario s;
    s.market = MarketParams::two_asset(0.3, 0.15, 0.5, 0.08, 1.0);
    s.cost = ExponentialCost{0.005, 1.0};
    s.payoff = {5.0, 30.0};
    return s;
}

std::string field_of(const Scenario& s) {
    try {
        validate(s);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return {};
}

} // namespace

TEST_CASE("two_asset expands the scalar correlation") {
    const auto m = MarketParams::two_asset(0.2, 0.3, -0.4, 0.05, 2.0);
    CHECK(m.dim() == 2);
    CHECK(m.rho(0, 1) == -0.4);
    CHECK(m.rho(1, 0) == -0.4);
    CHECK(m.rho(0, 0) == 1.0);
    CHECK(m.max_sigma() == doctest::Approx(0.3));
}

TEST_CASE("validate names the offending field") {
    auto s = base_scenario();
    CHECK(field_of(s).empty());

    s = base_scenario();
    s.market.sigmas(1) = 0.0;
    CHECK(field_of(s) == "market.sigmas[1]");

    s = base_scenario();
    s.market.rho(0, 1) = 1.2;
    s.market.rho(1, 0) = 1.2;
    CHECK(field_of(s) == "market.rho");

    s = base_scenario();
    s.market.rho(0, 1) = 0.3;
    CHECK(field_of(s) == "market.rho");

    s = base_scenario();
    s.market.T = -1.0;
    CHECK(field_of(s) == "market.T");

    s = base_scenario();
    s.cost = ExponentialCost{-1.0, 1.0};
    CHECK(field_of(s) == "cost.C0");

    s = base_scenario();
    s.cost = ExponentialCost{0.1, -1.0};
    CHECK(field_of(s) == "cost.k");

    s = base_scenario();
    s.payoff.strike = 0.0;
    CHECK(field_of(s) == "payoff.X");

    s = base_scenario();
    s.dt_tc = 0.0;
    CHECK(field_of(s) == "cost.dt_tc");

    s = base_scenario();
    s.grid.intervals = 2;
    CHECK(field_of(s) == "grid.nx");
}

TEST_CASE("three-asset correlation must be positive semidefinite") {
    MarketParams m;
    m.sigmas = Eigen::Vector3d(0.2, 0.2, 0.2);
    m.rho = Eigen::Matrix3d{{1.0, 0.9, -0.9}, {0.9, 1.0, 0.9}, {-0.9, 0.9, 1.0}};
    CHECK_THROWS_AS(validate_market(m), ConfigError);
    m.rho = Eigen::Matrix3d{{1.0, 0.5, 0.2}, {0.5, 1.0, 0.3}, {0.2, 0.3, 1.0}};
    CHECK_NOTHROW(validate_market(m));
}

TEST_CASE("validate is idempotent and fills default bounds") {
    const auto once = validate(base_scenario());
    const auto twice = validate(once);
    CHECK(once.grid.lower == twice.grid.lower);
    CHECK(once.grid.upper == twice.grid.upper);
    const double half = 3.0 * 0.3 + 1.0;
    CHECK(once.grid.lower == doctest::Approx(std::log(30.0) - half));
    CHECK(once.grid.upper == doctest::Approx(std::log(30.0) + half));
    CHECK(once.grid.nodes() == 101);
}

TEST_CASE("price grids map the default bounds through exp") {
    auto s = base_scenario();
    s.grid.coord = Coordinates::Price;
    s = validate(s);
    CHECK(s.grid.lower == doctest::Approx(std::exp(std::log(30.0) - 1.9)));
    CHECK(s.grid.price(0) == s.grid.lower);
    CHECK(s.grid.to_coordinate(30.0) == 30.0);
}

TEST_CASE("nearest_index clamps to the grid") {
    GridSpec g;
    g.lower = 0.0;
    g.upper = 1.0;
    g.intervals = 10;
    g.coord = Coordinates::Price;
    CHECK(g.nearest_index(-5.0) == 0);
    CHECK(g.nearest_index(0.34) == 3);
    CHECK(g.nearest_index(0.36) == 4);
    CHECK(g.nearest_index(7.0) == 10);
}

TEST_CASE("cost models") {
    CHECK(cost_value(ConstantCost{0.2}, 5.0) == 0.2);
    CHECK(cost_value(ExponentialCost{0.2, 2.0}, 0.5) == doctest::Approx(0.2 * std::exp(-1.0)));
    CHECK(*cost_derivative(ExponentialCost{0.2, 2.0}, 0.5) == doctest::Approx(-0.4 * std::exp(-1.0)));

    SampledCost s;
    s.curve = {{0.0, 1.0, 2.0}, {0.3, 0.2, 0.1}};
    s.lower = 0.1;
    s.upper = 0.3;
    CHECK(cost_value(s, -1.0) == 0.3);
    CHECK(cost_value(s, 0.5) == doctest::Approx(0.25));
    CHECK(cost_value(s, 9.0) == 0.1);
    CHECK_FALSE(cost_derivative(s, 0.5).has_value());
    CHECK_NOTHROW(validate_cost(s));

    s.curve.y[0] = 0.5;
    CHECK_THROWS_AS(validate_cost(s), ConfigError);

    CHECK(is_zero_cost(ExponentialCost{0.0, 3.0}));
    CHECK_FALSE(is_zero_cost(ConstantCost{1e-9}));
    const auto b = cost_bounds(ExponentialCost{0.4, 1.0});
    CHECK(b.lower == 0.0);
    CHECK(b.upper == 0.4);
}
