// SPDX-License-Identifier: MIT
#include "nlbs/cost_engine.hpp"
#include "nlbs/error.hpp"

#include "oracles.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

using namespace nlbs;

namespace {

double rel(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

Scenario t1() {
    Scenario s;
    s.market = MarketParams::two_asset(0.3, 0.15, 0.5, 0.08, 1.0);
    s.cost = ExponentialCost{0.005, 1.0};
    s.payoff = {5.0, 30.0};
    s.grid.intervals = 20;
    s.grid.steps = 10;
    return validate(s);
}

} // namespace

TEST_CASE("erfcx and the exponential bracket") {
    for (double x = 0.0; x < 25.0; x += 0.5) CHECK(erfcx(x) == doctest::Approx(std::exp(x * x) * std::erfc(x)));
    // Continuity across the switch to the asymptotic series.
    // d ln(erfcx) / dx is about -1/x here, so a 1e-9 step moves the value by 4e-11.
    CHECK(rel(erfcx(25.0 - 1e-9), erfcx(25.0)) < 1e-10);
    CHECK(rel(exponential_bracket(30.0 - 1e-9), exponential_bracket(30.0)) < 1e-10);

    double prev = 1.0;
    CHECK(exponential_bracket(0.0) == 1.0);
    for (double a = 0.01; a < 200.0; a *= 1.3) {
        const double b = exponential_bracket(a);
        CHECK(b > 0.0);
        CHECK(b < prev);
        prev = b;
    }
    CHECK(exponential_bracket(1e4) == doctest::Approx(1e-8).epsilon(1e-6));
}

TEST_CASE("expected cost closed forms against quadrature") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 30; ++t) {
        const double c0 = std::pow(10.0, -4.0 + 3.0 * u(rng));
        const double k = 5.0 * u(rng);
        const double theta = std::pow(10.0, -3.0 + 5.0 * u(rng));
        const double dt = std::pow(10.0, -4.0 + 2.0 * u(rng));
        const double ref = oracle::expected_cost_quadrature([&](double x) { return c0 * std::exp(-k * x); }, theta, dt);
        CHECK(rel(expected_cost(ExponentialCost{c0, k}, theta, dt), ref) < 1e-9);
    }
    CHECK(expected_cost(ConstantCost{0.01}, 4.0, 0.01) ==
          doctest::Approx(0.01 * std::sqrt(8.0 / std::numbers::pi)).epsilon(1e-14));
    CHECK(expected_cost(ExponentialCost{0.3, 0.0}, 2.0, 0.1) == expected_cost(ConstantCost{0.3}, 2.0, 0.1));
    CHECK(expected_cost(ConstantCost{0.1}, 0.0, 0.1) == 0.0);
    CHECK(expected_cost(ConstantCost{0.1}, -1e-18, 0.1) == 0.0);
    CHECK_THROWS_AS(expected_cost(ConstantCost{0.1}, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("sampled cost") {
    SampledCost flat;
    flat.curve = {{0.0, 1.0}, {0.02, 0.02}};
    flat.lower = flat.upper = 0.02;
    CHECK(rel(expected_cost(flat, 3.0, 0.01), expected_cost(ConstantCost{0.02}, 3.0, 0.01)) < 1e-9);

    SampledCost table;
    table.curve = {{0.0, 0.05, 0.2, 0.6}, {0.03, 0.025, 0.01, 0.002}};
    table.lower = 0.002;
    table.upper = 0.03;
    for (double theta : {0.01, 1.0, 50.0}) {
        const double ref = oracle::expected_cost_quadrature([&](double x) { return table.curve(x); }, theta, 0.004, table.curve.x);
        CHECK(rel(expected_cost(table, theta, 0.004), ref) < 1e-7);
    }
}

TEST_CASE("Theta as a quadratic form") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n : {1, 2, 3, 5}) {
        MarketParams m;
        m.sigmas = (Eigen::VectorXd::Random(n).array().abs() * 0.5 + 0.05).matrix();
        m.rho = oracle::random_correlation(rng, n);
        Eigen::VectorXd S = (Eigen::VectorXd::Random(n).array().abs() * 50 + 1).matrix();
        Eigen::MatrixXd B = Eigen::MatrixXd::Random(n, n);
        B = 0.5 * (B + B.transpose()).eval();
        const auto A = coefficient_matrix(m, S);
        for (int i = 0; i < n; ++i) {
            const double t = theta_from_hessian(static_cast<std::size_t>(i), B, A);
            CHECK(rel(t, oracle::theta_double_sum(static_cast<std::size_t>(i), B, m, S)) < 1e-12);
            CHECK(t >= -1e-12);
        }
    }
    CHECK_THROWS_AS(theta_from_hessian(2, Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Identity()),
                    std::invalid_argument);
}

TEST_CASE("Theta in log coordinates equals the price-coordinate form") {
    // V(S1, S2) = S1^2 S2 + 3 ln(S1) S2^2 + S1 S2^{1/2}, derivatives known in closed form.
    const auto m = MarketParams::two_asset(0.25, 0.4, -0.35, 0.05, 1.0);
    for (const auto [s1, s2] : {std::pair{1.5, 2.0}, std::pair{30.0, 12.0}, std::pair{0.2, 7.0}}) {
        Eigen::Matrix2d hp;
        hp(0, 0) = 2.0 * s2 - 3.0 * s2 * s2 / (s1 * s1);
        hp(1, 1) = 6.0 * std::log(s1) - 0.25 * s1 * std::pow(s2, -1.5);
        hp(0, 1) = hp(1, 0) = 2.0 * s1 + 6.0 * s2 / s1 + 0.5 * std::pow(s2, -0.5);
        const Eigen::Vector2d gp(2.0 * s1 * s2 + 3.0 * s2 * s2 / s1 + std::sqrt(s2),
                                 s1 * s1 + 6.0 * std::log(s1) * s2 + 0.5 * s1 / std::sqrt(s2));
        // V_xixj = S_i S_j V_SiSj + delta_ij S_i V_Si
        const Eigen::Vector2d S(s1, s2);
        Eigen::Matrix2d hx = S.asDiagonal() * hp * S.asDiagonal();
        hx(0, 0) += s1 * gp(0);
        hx(1, 1) += s2 * gp(1);
        const Eigen::Vector2d gx = S.cwiseProduct(gp);
        const Eigen::Vector2d x(std::log(s1), std::log(s2));
        const auto A = coefficient_matrix(m, S);
        for (std::size_t i = 0; i < 2; ++i)
            CHECK(rel(theta_log_coords(i, hx, gx, x, m), theta_from_hessian(i, hp, A)) < 1e-11);
    }
}

TEST_CASE("node derivatives are exact on quadratics") {
    const double h = 0.1;
    Eigen::MatrixXd u(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const double x = i * h;
            const double y = j * h;
            u(i, j) = 1.0 + 2.0 * x - y + 3.0 * x * x + 0.5 * y * y - 4.0 * x * y;
        }
    const auto c = node_derivatives(u, 2, 2, h, {MixedStencil::FourCorner, FirstDifference::Central});
    CHECK(c.grad(0) == doctest::Approx(2.0 + 6.0 * 0.2 - 4.0 * 0.2));
    CHECK(c.grad(1) == doctest::Approx(-1.0 + 0.2 - 4.0 * 0.2));
    CHECK(c.hess(0, 0) == doctest::Approx(6.0));
    CHECK(c.hess(1, 1) == doctest::Approx(1.0));
    CHECK(c.hess(0, 1) == doctest::Approx(-4.0));
    CHECK(c.hess(1, 0) == c.hess(0, 1));

    // The alternative mixed stencil is not consistent: on u = x y it does not give 1.
    Eigen::MatrixXd xy(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) xy(i, j) = i * h * j * h;
    CHECK(mixed_difference(xy, 2, 2, h, MixedStencil::FourCorner) == doctest::Approx(1.0));
    CHECK(mixed_difference(xy, 2, 2, h, MixedStencil::Skewed) == doctest::Approx(1.5));
}

TEST_CASE("assemble_G") {
    const auto s = t1();
    const Eigen::MatrixXd u = Eigen::MatrixXd::Random(21, 21) + Eigen::MatrixXd::Constant(21, 21, 3.0);
    const auto g = assemble_G(u, s);
    CHECK(g.row(0).isZero());
    CHECK(g.row(20).isZero());
    CHECK(g.col(0).isZero());
    CHECK(g.col(20).isZero());
    CHECK(g.minCoeff() >= 0.0);

    // Spot check one node against node_cost.
    const auto th = theta_field(u, s.grid, s.market);
    const Eigen::Vector2d thetas(th.theta[0](7, 11), th.theta[1](7, 11));
    const Eigen::Vector2d prices(s.grid.price(7), s.grid.price(11));
    CHECK(g(7, 11) == doctest::Approx(node_cost(s.cost, thetas, prices, s.dt_tc)));

    const auto verbatim = assemble_G(u, s, {}, {Prefactor::InverseDt});
    CHECK(verbatim(7, 11) == doctest::Approx(g(7, 11) / std::sqrt(s.dt_tc)));

    auto zero = s;
    zero.cost = ExponentialCost{0.0, 1.0};
    CHECK(assemble_G(u, zero).isZero());

    // A linear function in log coordinates still carries price curvature.
    Eigen::MatrixXd lin(21, 21);
    for (int i = 0; i < 21; ++i)
        for (int j = 0; j < 21; ++j) lin(i, j) = s.grid.coordinate(static_cast<std::size_t>(i));
    const auto tl = theta_field(lin, s.grid, s.market, {MixedStencil::FourCorner, FirstDifference::Central});
    const double s1 = s.grid.price(5);
    // V = ln S1 has V_11 = -1/S1^2, so Theta_1 = sigma1^2 / S1^2.
    CHECK(tl.theta[0](5, 9) == doctest::Approx(0.09 / (s1 * s1)).epsilon(1e-10));
    CHECK(tl.theta[1](5, 9) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("nonlinear_operator reduces to Black-Scholes without cost") {
    const auto m = MarketParams::two_asset(0.2, 0.3, 0.1, 0.05, 1.0);
    const Eigen::Matrix2d B{{0.3, -0.1}, {-0.1, 0.2}};
    const Eigen::Vector2d grad(0.4, 0.6);
    const Eigen::Vector2d S(10.0, 20.0);
    const double f = nonlinear_operator(B, grad, 3.0, S, m, ConstantCost{0.0}, 0.01);
    const auto A = coefficient_matrix(m, S);
    CHECK(f == doctest::Approx(-0.5 * (A * B).trace() - 0.05 * (4.0 + 12.0) + 0.15));
    const double fc = nonlinear_operator(B, grad, 3.0, S, m, ConstantCost{0.01}, 0.01);
    CHECK(fc > f);
}
