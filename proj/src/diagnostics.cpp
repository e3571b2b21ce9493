// SPDX-License-Identifier: MIT
#include "nlbs/diagnostics.hpp"

#include "nlbs/analytic_pricing.hpp"
#include "nlbs/cost_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nlbs {

Eigen::MatrixXd analytic_surface(const Scenario& raw, std::optional<double> tau) {
    const Scenario scenario = validate(raw);
    const GridSpec& g = scenario.grid;
    const double t = tau.value_or(scenario.market.T);
    const auto n = static_cast<Eigen::Index>(g.nodes());
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double s1 = g.price(static_cast<std::size_t>(i));
            const double s2 = g.price(static_cast<std::size_t>(j));
            if (s1 <= 0.0 || s2 <= 0.0) {
                // Only reachable on a price grid starting at zero; use the ring data instead.
                out(i, j) = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            out(i, j) = cbest_price(s1, s2, t, scenario.market, scenario.payoff);
        }
    }
    return out;
}

AnalyticError error_vs_analytic(const Eigen::MatrixXd& surface, const Scenario& raw, double band_cells,
                                std::optional<double> tau, double rel_floor) {
    const Scenario scenario = validate(raw);
    const GridSpec& g = scenario.grid;
    const std::size_t n = g.nodes();
    if (static_cast<std::size_t>(surface.rows()) != n || static_cast<std::size_t>(surface.cols()) != n)
        throw std::invalid_argument("error_vs_analytic: surface does not match grid");

    const Eigen::MatrixXd exact = analytic_surface(scenario, tau);
    const double edge = g.to_coordinate(scenario.payoff.strike);
    const double band = band_cells * g.dx();

    AnalyticError err;
    double abs_sum = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        for (std::size_t j = 1; j + 1 < n; ++j) {
            if (std::abs(std::max(g.coordinate(i), g.coordinate(j)) - edge) <= band) continue;
            const double e = exact(i, j);
            if (!std::isfinite(e)) continue;
            const double diff = std::abs(surface(i, j) - e);
            abs_sum += diff;
            ++err.compared;
            const double denom = std::max(std::abs(e), rel_floor);
            if (denom > 0.0) err.max_rel = std::max(err.max_rel, diff / denom);
        }
    }
    err.mean_abs = err.compared > 0 ? abs_sum / static_cast<double>(err.compared) : 0.0;
    return err;
}

std::vector<SweepRow> dt_sensitivity_sweep(const Scenario& raw, const std::vector<double>& dt_values,
                                           const std::vector<Probe>& probes, const SolverOptions& options) {
    for (std::size_t k = 0; k < dt_values.size(); ++k) {
        if (!(dt_values[k] > 0.0)) throw std::invalid_argument("dt_sensitivity_sweep: dt values must be positive");
        if (k > 0 && !(dt_values[k] < dt_values[k - 1]))
            throw std::invalid_argument("dt_sensitivity_sweep: dt values must be sorted descending");
    }
    Scenario scenario = validate(raw);

    std::vector<SweepRow> rows;
    rows.reserve(dt_values.size());
    for (const double dt : dt_values) {
        scenario.dt_tc = dt;
        const auto res = solve_nonlinear(scenario, options);
        SweepRow row;
        row.dt = dt;
        row.iterations = res.iterations;
        row.converged = res.converged;
        for (const auto& p : probes) {
            const auto i = scenario.grid.nearest_index(p.s1);
            const auto j = scenario.grid.nearest_index(p.s2);
            row.prices.push_back(res.terminal.values(i, j));
            row.costs.push_back(res.cost_field(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<double> log_spaced(double first, double last, std::size_t count) {
    if (!(first > 0.0) || !(last > 0.0)) throw std::invalid_argument("log_spaced: endpoints must be positive");
    if (count == 0) return {};
    if (count == 1) return {first};
    std::vector<double> out(count);
    const double a = std::log(first);
    const double step = (std::log(last) - a) / static_cast<double>(count - 1);
    for (std::size_t k = 0; k < count; ++k) out[k] = std::exp(a + step * static_cast<double>(k));
    out.front() = first;
    out.back() = last;
    return out;
}

PerronBound perron_bound(const Scenario& raw, std::optional<double> tau, const CostOptions& cost_options) {
    const Scenario scenario = validate(raw);
    PerronBound out;
    if (is_zero_cost(scenario.cost)) return out;

    std::vector<double> levels;
    if (tau) {
        levels.push_back(*tau);
    } else {
        const double dtau = scenario.grid.dtau(scenario.market.T);
        for (std::size_t m = 1; m <= scenario.grid.steps; ++m) levels.push_back(dtau * static_cast<double>(m));
        levels.back() = scenario.market.T;
    }

    const StencilOptions central{MixedStencil::FourCorner, FirstDifference::Central};
    const std::size_t n = scenario.grid.nodes();
    for (const double t : levels) {
        const CostField g = assemble_G(analytic_surface(scenario, t), scenario, central, cost_options);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            for (std::size_t j = 1; j + 1 < n; ++j) {
                const double v = std::abs(g(i, j));
                if (v > out.bound) {
                    out.bound = v;
                    out.i = i;
                    out.j = j;
                    out.tau = t;
                }
            }
        }
    }
    out.s1 = scenario.grid.price(out.i);
    out.s2 = scenario.grid.price(out.j);
    return out;
}

} // namespace nlbs
