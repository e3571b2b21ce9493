// SPDX-License-Identifier: MIT
#include "nlbs/adi_solver.hpp"

#include "nlbs/analytic_pricing.hpp"
#include "nlbs/error.hpp"
#include "nlbs/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace nlbs {

namespace {

// L = a11 d11 + a22 d22 + a12 d12 + b1 d1 + b2 d2 + c in grid coordinates.
struct NodeCoeffs {
    double a11, a22, a12, b1, b2, c;
};

class Coefficients {
public:
    explicit Coefficients(const Scenario& s) : market_(s.market), grid_(s.grid) {}

    NodeCoeffs at(std::size_t i, std::size_t j) const {
        const double s1 = market_.sigmas(0);
        const double s2 = market_.sigmas(1);
        const double rho = market_.rho(0, 1);
        const double r = market_.r;
        if (grid_.coord == Coordinates::LogPrice)
            return {0.5 * s1 * s1, 0.5 * s2 * s2, rho * s1 * s2, r - 0.5 * s1 * s1, r - 0.5 * s2 * s2, -r};
        const double p1 = grid_.price(i);
        const double p2 = grid_.price(j);
        return {0.5 * s1 * s1 * p1 * p1, 0.5 * s2 * s2 * p2 * p2, rho * s1 * s2 * p1 * p2, r * p1, r * p2, -r};
    }

private:
    const MarketParams& market_;
    const GridSpec& grid_;
};

struct Bands {
    std::vector<double> lower, diag, upper, rhs, x, scratch;

    explicit Bands(std::size_t n) : lower(n), diag(n), upper(n), rhs(n), x(n), scratch(n) {}
};

// Implicit half-operator along one axis: coefficients (a, b, c) of
// a d^2 + b d + c, halved and scaled by dtau.
void implicit_row(double a, double b, double c, double h, double dtau, FirstDifference first, double& lo,
                  double& di, double& up) {
    const double half = 0.5 * dtau;
    const double diff = a / (h * h);
    if (first == FirstDifference::Forward) {
        lo = -half * diff;
        up = -half * (diff + b / h);
        di = 1.0 + half * (2.0 * diff + b / h - c);
    } else {
        lo = -half * (diff - b / (2.0 * h));
        up = -half * (diff + b / (2.0 * h));
        di = 1.0 + half * (2.0 * diff - c);
    }
}

double first_diff(double minus, double centre, double plus, double h, FirstDifference first) {
    return first == FirstDifference::Forward ? (plus - centre) / h : (plus - minus) / (2.0 * h);
}

double single_asset_digital(double s, double sigma, double tau, const MarketParams& m, const PayoffSpec& p) {
    if (tau <= 0.0) return s >= p.strike ? p.cash : 0.0;
    const double d = (std::log(s / p.strike) + (m.r - 0.5 * sigma * sigma) * tau) / (sigma * std::sqrt(tau));
    return p.cash * std::exp(-m.r * tau) * norm_cdf(d);
}

double analytic_node(double s1, double s2, double tau, const Scenario& sc) {
    if (s1 <= 0.0 && s2 <= 0.0) return 0.0;
    if (s1 <= 0.0) return single_asset_digital(s2, sc.market.sigmas(1), tau, sc.market, sc.payoff);
    if (s2 <= 0.0) return single_asset_digital(s1, sc.market.sigmas(0), tau, sc.market, sc.payoff);
    return cbest_price(s1, s2, tau, sc.market, sc.payoff);
}

bool all_finite(const Eigen::MatrixXd& u) {
    return u.allFinite();
}

} // namespace

Eigen::MatrixXd initial_condition(const Scenario& scenario, bool smooth) {
    const GridSpec& g = scenario.grid;
    const auto n = static_cast<Eigen::Index>(g.nodes());
    Eigen::MatrixXd u(n, n);
    if (!smooth) {
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                u(i, j) = payoff(g.price(static_cast<std::size_t>(i)), g.price(static_cast<std::size_t>(j)),
                                 scenario.payoff);
        return u;
    }
    // Fraction of the cell around node i lying below the strike.
    const double edge = g.to_coordinate(scenario.payoff.strike);
    const double h = g.dx();
    auto below = [&](Eigen::Index i) {
        return std::clamp((edge - (g.coordinate(static_cast<std::size_t>(i)) - 0.5 * h)) / h, 0.0, 1.0);
    };
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) u(i, j) = scenario.payoff.cash * (1.0 - below(i) * below(j));
    return u;
}

std::vector<BoundaryRing> boundary_rings(const Scenario& scenario, const Eigen::MatrixXd& u0,
                                         BoundaryPolicy policy) {
    const GridSpec& g = scenario.grid;
    const auto n = static_cast<Eigen::Index>(g.nodes());
    if (u0.rows() != n || u0.cols() != n) throw std::invalid_argument("boundary_rings: u0 does not match grid");
    const double dtau = g.dtau(scenario.market.T);
    const std::size_t levels = 2 * g.steps + 1;

    std::vector<BoundaryRing> rings(levels);
    for (std::size_t k = 0; k < levels; ++k) {
        BoundaryRing& ring = rings[k];
        ring.i_lo.resize(n);
        ring.i_hi.resize(n);
        ring.j_lo.resize(n);
        ring.j_hi.resize(n);
        if (policy == BoundaryPolicy::DiscountedPayoff) {
            const double factor = std::pow(1.0 + 0.5 * scenario.market.r * dtau, -static_cast<double>(k));
            ring.i_lo = u0.row(0).transpose() * factor;
            ring.i_hi = u0.row(n - 1).transpose() * factor;
            ring.j_lo = u0.col(0) * factor;
            ring.j_hi = u0.col(n - 1) * factor;
            continue;
        }
        const double tau = std::min(0.5 * dtau * static_cast<double>(k), scenario.market.T);
        const double lo = g.price(0);
        const double hi = g.price(g.intervals);
        for (Eigen::Index t = 0; t < n; ++t) {
            const double s = g.price(static_cast<std::size_t>(t));
            ring.i_lo(t) = analytic_node(lo, s, tau, scenario);
            ring.i_hi(t) = analytic_node(hi, s, tau, scenario);
            ring.j_lo(t) = analytic_node(s, lo, tau, scenario);
            ring.j_hi(t) = analytic_node(s, hi, tau, scenario);
        }
    }
    return rings;
}

void apply_ring(Eigen::MatrixXd& u, const BoundaryRing& ring) {
    const auto n = u.rows();
    u.row(0) = ring.i_lo.transpose();
    u.row(n - 1) = ring.i_hi.transpose();
    u.col(0) = ring.j_lo;
    u.col(n - 1) = ring.j_hi;
}

Eigen::MatrixXd lx_stage(const Eigen::MatrixXd& um, const Scenario& scenario, const StencilOptions& stencil,
                         const BoundaryRing& ring) {
    const GridSpec& g = scenario.grid;
    const std::size_t n = g.nodes();
    const std::size_t m = n - 2;
    const double h = g.dx();
    const double dtau = g.dtau(scenario.market.T);
    const double half = 0.5 * dtau;
    const Coefficients coeffs(scenario);

    Eigen::MatrixXd out(um.rows(), um.cols());
    apply_ring(out, ring);
    Bands b(m);

    for (std::size_t j = 1; j + 1 < n; ++j) {
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const NodeCoeffs k = coeffs.at(i, j);
            const std::size_t row = i - 1;
            implicit_row(k.a11, k.b1, k.c, h, dtau, stencil.first, b.lower[row], b.diag[row], b.upper[row]);
            const double dyy = (um(i, j + 1) - 2.0 * um(i, j) + um(i, j - 1)) / (h * h);
            const double dxy = mixed_difference(um, i, j, h, stencil.mixed);
            const double dy = first_diff(um(i, j - 1), um(i, j), um(i, j + 1), h, stencil.first);
            b.rhs[row] = um(i, j) + half * (k.a22 * dyy + k.a12 * dxy + k.b2 * dy);
        }
        b.rhs[0] -= b.lower[0] * out(0, j);
        b.rhs[m - 1] -= b.upper[m - 1] * out(n - 1, j);
        thomas_solve(b.lower, b.diag, b.upper, b.rhs, b.x, b.scratch);
        for (std::size_t i = 1; i + 1 < n; ++i) out(i, j) = b.x[i - 1];
    }
    return out;
}

Eigen::MatrixXd ly_stage(const Eigen::MatrixXd& uhalf, const CostField* g_field, const Scenario& scenario,
                         const StencilOptions& stencil, const BoundaryRing& ring) {
    const GridSpec& g = scenario.grid;
    const std::size_t n = g.nodes();
    const std::size_t m = n - 2;
    const double h = g.dx();
    const double dtau = g.dtau(scenario.market.T);
    const double half = 0.5 * dtau;
    const Coefficients coeffs(scenario);

    Eigen::MatrixXd out(uhalf.rows(), uhalf.cols());
    apply_ring(out, ring);
    Bands b(m);

    for (std::size_t i = 1; i + 1 < n; ++i) {
        for (std::size_t j = 1; j + 1 < n; ++j) {
            const NodeCoeffs k = coeffs.at(i, j);
            const std::size_t row = j - 1;
            implicit_row(k.a22, k.b2, k.c, h, dtau, stencil.first, b.lower[row], b.diag[row], b.upper[row]);
            const double dxx = (uhalf(i + 1, j) - 2.0 * uhalf(i, j) + uhalf(i - 1, j)) / (h * h);
            const double dxy = mixed_difference(uhalf, i, j, h, stencil.mixed);
            const double dx = first_diff(uhalf(i - 1, j), uhalf(i, j), uhalf(i + 1, j), h, stencil.first);
            double rhs = uhalf(i, j) + half * (k.a11 * dxx + k.a12 * dxy + k.b1 * dx);
            if (g_field) rhs -= dtau * (*g_field)(i, j);
            b.rhs[row] = rhs;
        }
        b.rhs[0] -= b.lower[0] * out(i, 0);
        b.rhs[m - 1] -= b.upper[m - 1] * out(i, n - 1);
        thomas_solve(b.lower, b.diag, b.upper, b.rhs, b.x, b.scratch);
        for (std::size_t j = 1; j + 1 < n; ++j) out(i, j) = b.x[j - 1];
    }
    return out;
}

std::vector<Eigen::MatrixXd> sweep(const Eigen::MatrixXd& u0, const CostProvider& cost, const Scenario& scenario,
                                   const SolverOptions& options, const std::vector<BoundaryRing>& rings) {
    const std::size_t steps = scenario.grid.steps;
    if (rings.size() != 2 * steps + 1) throw std::invalid_argument("sweep: boundary data has the wrong length");

    std::vector<Eigen::MatrixXd> levels;
    levels.reserve(steps + 1);
    levels.push_back(u0);
    for (std::size_t m = 0; m < steps; ++m) {
        const Eigen::MatrixXd half = lx_stage(levels[m], scenario, options.stencil, rings[2 * m + 1]);
        if (cost) {
            const CostField g = cost(m);
            levels.push_back(ly_stage(half, &g, scenario, options.stencil, rings[2 * m + 2]));
        } else {
            levels.push_back(ly_stage(half, nullptr, scenario, options.stencil, rings[2 * m + 2]));
        }
    }
    return levels;
}

std::vector<Eigen::MatrixXd> sweep(const Eigen::MatrixXd& u0, const Scenario& scenario,
                                   const SolverOptions& options) {
    return sweep(u0, CostProvider{}, scenario, options, boundary_rings(scenario, u0, options.boundary));
}

NonlinearResult solve_nonlinear(const Scenario& raw, const SolverOptions& options) {
    if (!(options.tol > 0.0)) throw ConfigError("solver.tol", "tol must be positive");
    if (options.max_iter < 1) throw ConfigError("solver.max_iter", "max_iter must be at least 1");
    const Scenario scenario = validate(raw);

    const Eigen::MatrixXd u0 = initial_condition(scenario, options.smooth_payoff);
    const auto rings = boundary_rings(scenario, u0, options.boundary);

    NonlinearResult result;
    // U^0 = 0 has a vanishing Hessian, so the first iterate is the linear solve.
    auto prev = sweep(u0, CostProvider{}, scenario, options, rings);
    result.iterations = 1;

    if (is_zero_cost(scenario.cost)) {
        result.history.push_back({1, 0.0, 0.0, 0.0});
        result.converged = true;
        result.terminal = {prev.back(), scenario.grid.steps, 1};
        result.cost_field = CostField::Zero(u0.rows(), u0.cols());
        return result;
    }

    while (result.iterations < options.max_iter) {
        const CostProvider provider = [&](std::size_t m) {
            return assemble_G(prev[m], scenario, options.stencil, options.cost);
        };
        auto cur = sweep(u0, provider, scenario, options, rings);
        ++result.iterations;
        const auto record = convergence_record(result.iterations - 1, cur.back(), prev.back(), options.norm);
        result.history.push_back(record);
        prev = std::move(cur);
        if (!all_finite(prev.back()) || !std::isfinite(record.dinf)) break;
        if (record.dinf < options.tol) {
            result.converged = true;
            break;
        }
    }

    result.terminal = {prev.back(), scenario.grid.steps, result.iterations};
    if (all_finite(prev.back()))
        result.cost_field = assemble_G(prev.back(), scenario, options.stencil, options.cost);
    else
        result.cost_field = CostField::Constant(u0.rows(), u0.cols(), std::numeric_limits<double>::quiet_NaN());
    return result;
}

} // namespace nlbs
