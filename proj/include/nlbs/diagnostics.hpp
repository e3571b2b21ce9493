// SPDX-License-Identifier: MIT
#pragma once

#include "nlbs/adi_solver.hpp"
#include "nlbs/market_model.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

namespace nlbs {

struct AnalyticError {
    double max_rel = 0.0;
    double mean_abs = 0.0;
    std::size_t compared = 0;  // interior nodes outside the band
};

/// Compares a surface at tau against the zero-cost closed form over interior
/// nodes with |max(x1, x2) - x(X)| > band_cells * dx. Relative errors use
/// max(|exact|, rel_floor) as denominator; nodes where that is zero count
/// only towards mean_abs.
AnalyticError error_vs_analytic(const Eigen::MatrixXd& surface, const Scenario& scenario, double band_cells = 2.0,
                                std::optional<double> tau = std::nullopt, double rel_floor = 0.0);

/// Closed-form price sampled on the grid at tau (default T).
Eigen::MatrixXd analytic_surface(const Scenario& scenario, std::optional<double> tau = std::nullopt);

struct Probe {
    double s1 = 0.0;
    double s2 = 0.0;
};

struct SweepRow {
    double dt = 0.0;
    std::vector<double> prices;  // per probe, nearest node of the terminal surface
    std::vector<double> costs;   // G of the terminal surface at the same nodes
    std::size_t iterations = 0;
    bool converged = false;
};

/// One nonlinear solve per rehedging interval.
std::vector<SweepRow> dt_sensitivity_sweep(const Scenario& scenario, const std::vector<double>& dt_values,
                                           const std::vector<Probe>& probes, const SolverOptions& options = {});

/// count points from `first` to `last`, equally spaced in log.
std::vector<double> log_spaced(double first, double last, std::size_t count);

struct PerronBound {
    double bound = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    double s1 = 0.0;
    double s2 = 0.0;
    double tau = 0.0;  // time to maturity of the maximizing level
};

/// Largest |G(x, D^2 Lambda)| over interior nodes, with Lambda the zero-cost
/// closed form differentiated by central differences on the grid. Without
/// `tau` the maximum also runs over the time levels tau_m = m dtau,
/// m = 1 .. steps; with it only that level is scanned.
PerronBound perron_bound(const Scenario& scenario, std::optional<double> tau = std::nullopt,
                         const CostOptions& cost_options = {});

} // namespace nlbs
