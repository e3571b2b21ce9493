// SPDX-License-Identifier: MIT
#include "nlbs/analytic_pricing.hpp"

#include "oracles.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace nlbs;

TEST_CASE("norm_cdf agrees with a 50-digit evaluation") {
    for (double x = -30.0; x <= 8.0; x += 0.37) {
        const double ref = oracle::norm_cdf_mp(x);
        // The argument x / sqrt(2) is rounded, which costs about x^2 ulps in the tail.
        CHECK(std::abs(norm_cdf(x) - ref) <= 2e-16 * (4.0 + x * x) * ref);
    }
    CHECK(norm_cdf(INFINITY) == 1.0);
    CHECK(norm_cdf(-INFINITY) == 0.0);
}

TEST_CASE("bivariate_cdf against nested quadrature") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> arg(-4.0, 4.0);
    std::uniform_real_distribution<double> corr(-0.99, 0.99);
    for (int t = 0; t < 40; ++t) {
        const double a = arg(rng);
        const double b = arg(rng);
        const double r = corr(rng);
        CHECK(std::abs(bivariate_cdf(a, b, r) - oracle::bivariate_cdf_2d(a, b, r)) < 1e-9);
    }
}

TEST_CASE("bivariate_cdf identities") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> arg(-3.0, 3.0);
    std::uniform_real_distribution<double> corr(-0.95, 0.95);
    for (int t = 0; t < 200; ++t) {
        const double a = arg(rng);
        const double b = arg(rng);
        const double r = corr(rng);
        const double m = bivariate_cdf(a, b, r);
        CHECK(m == doctest::Approx(bivariate_cdf(b, a, r)).epsilon(1e-12));
        // M(a, b; r) + M(a, -b; -r) = N(a)
        CHECK(m + bivariate_cdf(a, -b, -r) == doctest::Approx(norm_cdf(a)).epsilon(1e-12));
        CHECK(m <= std::min(norm_cdf(a), norm_cdf(b)) + 1e-15);
    }
    CHECK(bivariate_cdf(0.0, 0.0, 0.0) == doctest::Approx(0.25));
    CHECK(bivariate_cdf(0.0, 0.0, 0.5) == doctest::Approx(0.25 + std::asin(0.5) / (2.0 * M_PI)));
    CHECK(bivariate_cdf(1.0, INFINITY, 0.3) == doctest::Approx(norm_cdf(1.0)));
    CHECK(bivariate_cdf(-INFINITY, 2.0, 0.3) == 0.0);
    CHECK_THROWS_AS(bivariate_cdf(0.0, 0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(bivariate_cdf(NAN, 0.0, 0.0), std::domain_error);
}

TEST_CASE("cbest_price matches the joint-probability representation") {
    const auto m = MarketParams::two_asset(0.3, 0.15, 0.5, 0.08, 1.0);
    const PayoffSpec p{5.0, 30.0};
    for (double s1 : {15.0, 27.0, 30.0, 41.0}) {
        for (double s2 : {12.0, 29.5, 36.0}) {
            for (double tau : {0.05, 0.5, 1.0}) {
                CHECK(cbest_price(s1, s2, tau, m, p) ==
                      doctest::Approx(oracle::cbest_price(s1, s2, tau, m, p)).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("cbest_price basic properties") {
    const auto m = MarketParams::two_asset(0.2, 0.35, -0.3, 0.05, 2.0);
    const PayoffSpec p{1.0, 10.0};
    CHECK(cbest_price(12.0, 3.0, 0.0, m, p) == 1.0);
    CHECK(cbest_price(9.0, 3.0, 0.0, m, p) == 0.0);
    double prev = 0.0;
    for (double s = 2.0; s < 40.0; s += 1.0) {
        const double v = cbest_price(s, 8.0, 1.0, m, p);
        CHECK(v >= prev);
        CHECK(v <= std::exp(-0.05));
        prev = v;
    }
    // Symmetric inputs give a symmetric price.
    const auto sym = MarketParams::two_asset(0.25, 0.25, 0.4, 0.05, 1.0);
    CHECK(cbest_price(8.0, 11.0, 0.7, sym, p) == doctest::Approx(cbest_price(11.0, 8.0, 0.7, sym, p)));
    CHECK_THROWS_AS(cbest_price(0.0, 1.0, 0.5, m, p), std::invalid_argument);
    CHECK_THROWS_AS(cbest_price(1.0, 1.0, 3.0, m, p), std::invalid_argument);
}

TEST_CASE("identical dynamics reduce to a single digital") {
    const auto m = MarketParams::two_asset(0.2, 0.2, 1.0, 0.03, 1.0);
    const PayoffSpec p{2.0, 10.0};
    const double d2 = (std::log(11.0 / 10.0) + (0.03 - 0.02) * 0.5) / (0.2 * std::sqrt(0.5));
    CHECK(cbest_price(11.0, 9.0, 0.5, m, p) == doctest::Approx(2.0 * std::exp(-0.015) * norm_cdf(d2)));
}

TEST_CASE("the alternative transcription differs from the price") {
    const auto m = MarketParams::two_asset(0.3, 0.15, 0.5, 0.08, 1.0);
    const PayoffSpec p{5.0, 30.0};
    const auto v = cbest_intermediates(30.0, 30.0, 1.0, m, p, CbestForm::Alternative);
    CHECK(v.rho2 < -1.0);
    CHECK_THROWS_AS(cbest_price(30.0, 30.0, 1.0, m, p, CbestForm::Alternative), std::domain_error);

    const auto w = MarketParams::two_asset(0.3, 0.3, 0.5, 0.08, 1.0);
    const double standard = cbest_price(30.0, 30.0, 1.0, w, p);
    const double verbatim = cbest_price(30.0, 30.0, 1.0, w, p, CbestForm::Alternative);
    CHECK(std::abs(standard - verbatim) > 1e-3);
}
