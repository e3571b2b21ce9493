// SPDX-License-Identifier: MIT
#pragma once

#include "nlbs/grid.hpp"

#include <Eigen/Dense>

#include <optional>
#include <variant>
#include <vector>

namespace nlbs {

struct MarketParams {
    Eigen::VectorXd sigmas;  // per-asset volatility
    Eigen::MatrixXd rho;     // full correlation matrix
    double r = 0.0;
    double T = 1.0;

    std::size_t dim() const { return static_cast<std::size_t>(sigmas.size()); }
    double max_sigma() const { return sigmas.maxCoeff(); }

    /// Two-asset market with a scalar correlation expanded to [[1,rho],[rho,1]].
    static MarketParams two_asset(double sigma1, double sigma2, double rho, double r, double T);
};

/// C(x) = c0.
struct ConstantCost {
    double c0 = 0.0;
};

/// C(x) = c0 * exp(-k x).
struct ExponentialCost {
    double c0 = 0.0;
    double k = 0.0;
};

/// Piecewise-linear table with flat extrapolation on both ends.
struct CostCurve {
    std::vector<double> x;
    std::vector<double> y;

    double operator()(double at) const;
};

/// Tabulated cost function. Bounds must be supplied and are checked against
/// the table; the derivative table is only needed for ellipticity checks.
struct SampledCost {
    CostCurve curve;
    std::optional<CostCurve> derivative;
    double lower = 0.0;
    double upper = 0.0;
};

using CostModel = std::variant<ConstantCost, ExponentialCost, SampledCost>;

struct CostBounds {
    double lower;
    double upper;
};

double cost_value(const CostModel& cost, double x);

/// C'(x), or nullopt when the model carries no derivative information.
std::optional<double> cost_derivative(const CostModel& cost, double x);

CostBounds cost_bounds(const CostModel& cost);

/// True when C vanishes identically, so the nonlinear term is zero.
bool is_zero_cost(const CostModel& cost);

/// Pays `cash` if max(S1, S2) >= strike at expiry.
struct BestCashOrNothing {
    double cash = 0.0;
    double strike = 0.0;
};

using PayoffSpec = BestCashOrNothing;

struct Scenario {
    MarketParams market;
    CostModel cost;
    PayoffSpec payoff;
    double dt_tc = 1.0 / 261.0;  // rehedging interval
    GridSpec grid;
};

/// Checks every invariant of the market parameters (N >= 1).
void validate_market(const MarketParams& market);

void validate_cost(const CostModel& cost);

/// Validates a scenario for solver use (N == 2) and fills default grid bounds
/// when none were given. Throws ConfigError naming the offending field.
/// Idempotent.
Scenario validate(Scenario raw);

/// Default square domain: log(X) -/+ (3 sigma_max sqrt(T) + 1), mapped to
/// prices for price coordinates.
GridSpec default_bounds(GridSpec grid, const MarketParams& market, const PayoffSpec& payoff);

} // namespace nlbs
