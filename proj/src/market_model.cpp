// SPDX-License-Identifier: MIT
#include "nlbs/market_model.hpp"

#include "nlbs/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nlbs {

namespace {

constexpr double kPsdTolerance = 1e-10;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void validate_curve(const CostCurve& curve, const std::string& field) {
    if (curve.x.empty() || curve.x.size() != curve.y.size())
        throw ConfigError(field, "table needs matching, non-empty x and y columns");
    for (std::size_t i = 0; i < curve.x.size(); ++i) {
        if (!std::isfinite(curve.x[i]) || !std::isfinite(curve.y[i]))
            throw ConfigError(field, "non-finite table entry");
        if (i > 0 && !(curve.x[i] > curve.x[i - 1]))
            throw ConfigError(field, "x column must be strictly increasing");
    }
    if (curve.x.front() < 0.0) throw ConfigError(field, "x column must start at x >= 0");
}

} // namespace

MarketParams MarketParams::two_asset(double sigma1, double sigma2, double rho, double r, double T) {
    MarketParams m;
    m.sigmas = Eigen::Vector2d(sigma1, sigma2);
    m.rho = Eigen::Matrix2d{{1.0, rho}, {rho, 1.0}};
    m.r = r;
    m.T = T;
    return m;
}

double CostCurve::operator()(double at) const {
    if (at <= x.front()) return y.front();
    if (at >= x.back()) return y.back();
    const auto hi = std::upper_bound(x.begin(), x.end(), at);
    const auto k = static_cast<std::size_t>(hi - x.begin());
    const double w = (at - x[k - 1]) / (x[k] - x[k - 1]);
    return y[k - 1] + w * (y[k] - y[k - 1]);
}

double cost_value(const CostModel& cost, double x) {
    return std::visit(overloaded{
                          [](const ConstantCost& c) { return c.c0; },
                          [x](const ExponentialCost& c) { return c.c0 * std::exp(-c.k * x); },
                          [x](const SampledCost& c) { return c.curve(x); },
                      },
                      cost);
}

std::optional<double> cost_derivative(const CostModel& cost, double x) {
    return std::visit(overloaded{
                          [](const ConstantCost&) -> std::optional<double> { return 0.0; },
                          [x](const ExponentialCost& c) -> std::optional<double> {
                              return -c.k * c.c0 * std::exp(-c.k * x);
                          },
                          [x](const SampledCost& c) -> std::optional<double> {
                              if (!c.derivative) return std::nullopt;
                              return (*c.derivative)(x);
                          },
                      },
                      cost);
}

CostBounds cost_bounds(const CostModel& cost) {
    return std::visit(overloaded{
                          [](const ConstantCost& c) { return CostBounds{c.c0, c.c0}; },
                          [](const ExponentialCost& c) {
                              return c.k == 0.0 ? CostBounds{c.c0, c.c0} : CostBounds{0.0, c.c0};
                          },
                          [](const SampledCost& c) { return CostBounds{c.lower, c.upper}; },
                      },
                      cost);
}

bool is_zero_cost(const CostModel& cost) {
    return cost_bounds(cost).upper == 0.0;
}

void validate_market(const MarketParams& m) {
    const auto n = m.sigmas.size();
    if (n < 1) throw ConfigError("market.sigmas", "at least one asset required");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(m.sigmas[i] > 0.0) || !std::isfinite(m.sigmas[i]))
            throw ConfigError("market.sigmas[" + std::to_string(i) + "]", "sigma must be positive");
    }
    if (m.rho.rows() != n || m.rho.cols() != n)
        throw ConfigError("market.rho", "correlation matrix must be " + std::to_string(n) + "x" +
                                            std::to_string(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double v = m.rho(i, j);
            if (!std::isfinite(v) || v < -1.0 || v > 1.0)
                throw ConfigError("market.rho", "rho out of range [-1, 1]");
            if (v != m.rho(j, i)) throw ConfigError("market.rho", "rho must be symmetric");
        }
        if (m.rho(i, i) != 1.0) throw ConfigError("market.rho", "rho must have unit diagonal");
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.rho, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -kPsdTolerance)
        throw ConfigError("market.rho", "rho is not positive semidefinite");
    if (!std::isfinite(m.r)) throw ConfigError("market.r", "r must be finite");
    if (!(m.T > 0.0) || !std::isfinite(m.T)) throw ConfigError("market.T", "T must be positive");
}

void validate_cost(const CostModel& cost) {
    std::visit(overloaded{
                   [](const ConstantCost& c) {
                       if (!(c.c0 >= 0.0) || !std::isfinite(c.c0))
                           throw ConfigError("cost.C0", "C0 must be nonnegative");
                   },
                   [](const ExponentialCost& c) {
                       if (!(c.c0 >= 0.0) || !std::isfinite(c.c0))
                           throw ConfigError("cost.C0", "C0 must be nonnegative");
                       if (!(c.k >= 0.0) || !std::isfinite(c.k))
                           throw ConfigError("cost.k", "k must be nonnegative");
                   },
                   [](const SampledCost& c) {
                       validate_curve(c.curve, "cost.curve");
                       if (c.derivative) validate_curve(*c.derivative, "cost.derivative");
                       if (!(c.lower >= 0.0) || !(c.upper >= c.lower) || !std::isfinite(c.upper))
                           throw ConfigError("cost.bounds", "need 0 <= lower <= upper");
                       for (double v : c.curve.y) {
                           if (v < c.lower || v > c.upper)
                               throw ConfigError("cost.curve", "table value outside [lower, upper]");
                       }
                   },
               },
               cost);
}

GridSpec default_bounds(GridSpec grid, const MarketParams& market, const PayoffSpec& payoff) {
    const double half_width = 3.0 * market.max_sigma() * std::sqrt(market.T) + 1.0;
    const double centre = std::log(payoff.strike);
    grid.lower = centre - half_width;
    grid.upper = centre + half_width;
    if (grid.coord == Coordinates::Price) {
        grid.lower = std::exp(grid.lower);
        grid.upper = std::exp(grid.upper);
    }
    return grid;
}

Scenario validate(Scenario s) {
    validate_market(s.market);
    if (s.market.dim() != 2) throw ConfigError("market.sigmas", "solver scenarios need exactly 2 assets");
    validate_cost(s.cost);
    if (!(s.payoff.cash > 0.0) || !std::isfinite(s.payoff.cash))
        throw ConfigError("payoff.K", "K must be positive");
    if (!(s.payoff.strike > 0.0) || !std::isfinite(s.payoff.strike))
        throw ConfigError("payoff.X", "X must be positive");
    if (!(s.dt_tc > 0.0) || !std::isfinite(s.dt_tc))
        throw ConfigError("cost.dt_tc", "dt_tc must be positive");

    GridSpec& g = s.grid;
    if (!g.has_bounds()) g = default_bounds(g, s.market, s.payoff);
    if (!(g.upper > g.lower)) throw ConfigError("grid.b", "upper bound must exceed lower bound");
    if (g.coord == Coordinates::Price && !(g.lower >= 0.0))
        throw ConfigError("grid.a", "price-coordinate grids need a nonnegative lower bound");
    if (g.intervals < 4) throw ConfigError("grid.nx", "need at least 4 intervals");
    if (g.steps < 1) throw ConfigError("grid.nt", "need at least 1 time step");
    return s;
}

} // namespace nlbs
