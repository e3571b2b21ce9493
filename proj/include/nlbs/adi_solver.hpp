// SPDX-License-Identifier: MIT
#pragma once

#include "nlbs/cost_engine.hpp"
#include "nlbs/grid.hpp"
#include "nlbs/market_model.hpp"
#include "nlbs/norms.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <vector>

namespace nlbs {

/// Dirichlet data on the outer ring of the grid.
///   Analytic:         the zero-cost closed-form price at the current tau.
///   DiscountedPayoff: the initial ring values times (1 + r dtau / 2)^{-k}
///                     after k half steps, which is what the scheme itself
///                     produces for constant data.
enum class BoundaryPolicy { Analytic, DiscountedPayoff };

struct SolverOptions {
    StencilOptions stencil;
    CostOptions cost;
    BoundaryPolicy boundary = BoundaryPolicy::Analytic;
    bool smooth_payoff = false;
    double tol = 1e-6;  // on the infinity-norm distance at tau = T
    std::size_t max_iter = 25;
    NormKind norm = NormKind::Induced;
};

/// Ring values at one half-step level. i_lo[j] = U(0, j), i_hi[j] = U(n-1, j),
/// j_lo[i] = U(i, 0), j_hi[i] = U(i, n-1).
struct BoundaryRing {
    Eigen::VectorXd i_lo, i_hi, j_lo, j_hi;
};

/// Payoff on the grid. With `smooth` each node holds the payoff averaged over
/// its cell instead of the point value.
Eigen::MatrixXd initial_condition(const Scenario& scenario, bool smooth = false);

/// Ring data for half-levels k = 0 .. 2 * steps (tau = k dtau / 2).
std::vector<BoundaryRing> boundary_rings(const Scenario& scenario, const Eigen::MatrixXd& u0, BoundaryPolicy policy);

void apply_ring(Eigen::MatrixXd& u, const BoundaryRing& ring);

/// First half step: implicit in asset 1 (row index i), explicit in asset 2.
Eigen::MatrixXd lx_stage(const Eigen::MatrixXd& um, const Scenario& scenario, const StencilOptions& stencil,
                         const BoundaryRing& ring);

/// Second half step: implicit in asset 2 (column index j). `g` (may be null)
/// is the frozen cost term, subtracted as dtau * g.
Eigen::MatrixXd ly_stage(const Eigen::MatrixXd& uhalf, const CostField* g, const Scenario& scenario,
                         const StencilOptions& stencil, const BoundaryRing& ring);

/// Cost term for the step leaving level m; an empty function means G = 0.
using CostProvider = std::function<CostField(std::size_t level)>;

/// All levels 0 .. steps of one linear solve started from u0.
std::vector<Eigen::MatrixXd> sweep(const Eigen::MatrixXd& u0, const CostProvider& cost, const Scenario& scenario,
                                   const SolverOptions& options, const std::vector<BoundaryRing>& rings);

/// Convenience: zero cost term, rings built from the options' policy.
std::vector<Eigen::MatrixXd> sweep(const Eigen::MatrixXd& u0, const Scenario& scenario,
                                   const SolverOptions& options = {});

struct NonlinearResult {
    Surface terminal;
    std::vector<ConvergenceRecord> history;  // row n: d(U^{n+1}, U^n) at tau = T
    std::size_t iterations = 0;              // linear sweeps performed
    bool converged = false;
    CostField cost_field;  // G of the terminal surface
};

/// Frozen-cost fixed point. Iterate 1 starts from U^0 = 0 (so G = 0); iterate
/// n takes G at level m from iterate n-1 at level m.
NonlinearResult solve_nonlinear(const Scenario& scenario, const SolverOptions& options = {});

} // namespace nlbs
