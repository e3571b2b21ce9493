// SPDX-License-Identifier: MIT
#include "nlbs/analytic_pricing.hpp"
#include "nlbs/diagnostics.hpp"

#include "doctest.h"

#include <cmath>

using namespace nlbs;

namespace {

Scenario small() {
    Scenario s;
    s.market = MarketParams::two_asset(0.3, 0.15, 0.5, 0.08, 1.0);
    s.cost = ConstantCost{0.004};
    s.payoff = {5.0, 30.0};
    s.grid.intervals = 20;
    s.grid.steps = 8;
    return validate(s);
}

} // namespace

TEST_CASE("analytic_surface samples the closed form") {
    const auto s = small();
    const auto a = analytic_surface(s, 0.4);
    CHECK(a(3, 17) == doctest::Approx(cbest_price(s.grid.price(3), s.grid.price(17), 0.4, s)));
    CHECK(analytic_surface(s)(10, 10) == doctest::Approx(cbest_price(s.grid.price(10), s.grid.price(10), 1.0, s)));
}

TEST_CASE("error_vs_analytic") {
    const auto s = small();
    const auto exact = analytic_surface(s);
    const auto zero = error_vs_analytic(exact, s);
    CHECK(zero.max_rel == 0.0);
    CHECK(zero.mean_abs == 0.0);

    // Count of interior nodes outside the band, by brute force.
    const double edge = std::log(30.0);
    std::size_t expected = 0;
    for (std::size_t i = 1; i < 20; ++i)
        for (std::size_t j = 1; j < 20; ++j)
            if (std::abs(std::max(s.grid.coordinate(i), s.grid.coordinate(j)) - edge) > 2.0 * s.grid.dx()) ++expected;
    CHECK(zero.compared == expected);
    // The strike sits on node 10, so a zero-width band still drops the 19 nodes on its edge.
    CHECK(error_vs_analytic(exact, s, 0.0).compared == 19 * 19 - 19);

    Eigen::MatrixXd shifted = exact.array() + 0.01;
    const auto e = error_vs_analytic(shifted, s, 2.0, std::nullopt, 0.25);
    CHECK(e.mean_abs == doctest::Approx(0.01));
    CHECK(e.max_rel == doctest::Approx(0.04));
    CHECK(error_vs_analytic(shifted, s).max_rel > e.max_rel);
    CHECK_THROWS_AS(error_vs_analytic(Eigen::MatrixXd::Zero(3, 3), s), std::invalid_argument);
}

TEST_CASE("log_spaced") {
    const auto v = log_spaced(0.007, 7.6e-5, 100);
    REQUIRE(v.size() == 100);
    CHECK(v.front() == 0.007);
    CHECK(v.back() == 7.6e-5);
    for (std::size_t k = 1; k + 1 < v.size(); ++k)
        CHECK(v[k] * v[k] == doctest::Approx(v[k - 1] * v[k + 1]).epsilon(1e-12));
    CHECK(log_spaced(1.0, 2.0, 1) == std::vector<double>{1.0});
    CHECK(log_spaced(1.0, 2.0, 0).empty());
    CHECK_THROWS_AS(log_spaced(0.0, 1.0, 3), std::invalid_argument);
}

TEST_CASE("dt_sensitivity_sweep") {
    const auto s = small();
    CHECK_THROWS_AS(dt_sensitivity_sweep(s, {0.001, 0.002}, {}), std::invalid_argument);
    SolverOptions opt;
    opt.max_iter = 6;
    opt.tol = 1e-4;
    const auto rows = dt_sensitivity_sweep(s, {0.01, 0.001}, {{30.0, 30.0}, {20.0, 40.0}}, opt);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].dt == 0.01);
    REQUIRE(rows[0].costs.size() == 2);
    CHECK(rows[1].costs[0] > rows[0].costs[0]);
    CHECK(rows[1].prices[0] < rows[0].prices[0]);
}

TEST_CASE("Perron bound") {
    auto s = small();
    s.cost = ConstantCost{0.0};
    const auto none = perron_bound(s);
    CHECK(none.bound == 0.0);

    s.cost = ConstantCost{0.01};
    const auto one = perron_bound(s);
    s.cost = ConstantCost{0.03};
    const auto three = perron_bound(s);
    CHECK(three.bound == doctest::Approx(3.0 * one.bound).epsilon(1e-12));
    CHECK(three.i == one.i);
    CHECK(three.j == one.j);
    CHECK(one.s1 == s.grid.price(one.i));
}

TEST_CASE("Perron bound covers every time level") {
    auto s = small();
    const auto all = perron_bound(s);
    for (double tau : {0.125, 0.5, 1.0}) CHECK(perron_bound(s, tau).bound <= all.bound);
    const auto at = perron_bound(s, all.tau);
    CHECK(at.bound == all.bound);
    CHECK(all.tau > 0.0);
}
