// SPDX-License-Identifier: MIT
#pragma once

#include "nlbs/cost_engine.hpp"
#include "nlbs/market_model.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace nlbs {

struct DyfInputs {
    Eigen::MatrixXd B;  // symmetric Hessian candidate (price coordinates)
    Eigen::MatrixXd A;  // coefficient matrix at S
    Eigen::VectorXd S;
    double dt = 1.0 / 261.0;
    CostModel cost;
};

/// I1 = int_0^inf C(H) y e^{-y^2} dy and I2 = int_0^inf C'(H) y^2 e^{-y^2} dy
/// with H = sqrt(2 dt theta) y.
struct CostIntegrals {
    double i1 = 0.0;
    double i2 = 0.0;
};

/// Closed form for Constant cost, adaptive quadrature otherwise. Sampled
/// costs need a derivative table.
CostIntegrals cost_integrals(const CostModel& cost, double theta, double dt);

/// dE/dtheta of expected_cost, assembled from the integrals.
double expected_cost_slope(const CostModel& cost, double theta, double dt);

enum class DyfForm {
    Dense,     // each Theta_i contributes its slope times the full matrix AB + BA
    RowExact,  // each Theta_i contributes only on row and column i, the exact derivative
};

/// Derivative of the nonlinear operator with respect to the Hessian,
///   -A/2 + sum_i (S_i / sqrt(dt)) dE/dTheta_i * dTheta_i/dB.
/// Throws NumericalError("theta singular at asset i") when Theta_i <= theta_floor.
Eigen::MatrixXd dyf_matrix(const DyfInputs& in, DyfForm form = DyfForm::Dense, double theta_floor = 1e-14);

struct DefinitenessCheck {
    bool negative_definite = false;
    double max_eigenvalue = 0.0;
};

DefinitenessCheck is_negative_definite(const Eigen::MatrixXd& m, double tol = 1e-10);

/// sqrt(2/pi) C0 / (sigma sqrt(dt)), with C0 the round-trip proportional cost.
double leland_number(double sigma, double c0, double dt);

inline bool leland_well_posed(double le) { return le < 1.0; }

enum class NodeVerdict { Satisfied, Violated, Degenerate };

struct EllipticityNode {
    std::size_t i = 0;
    std::size_t j = 0;
    double s1 = 0.0;
    double s2 = 0.0;
    double max_eigenvalue = 0.0;  // NaN for degenerate nodes
    NodeVerdict verdict = NodeVerdict::Degenerate;
};

struct EllipticityReport {
    std::vector<EllipticityNode> nodes;  // interior nodes, row-major
    std::size_t satisfied = 0;
    std::size_t violated = 0;
    std::size_t degenerate = 0;
    std::size_t worst = 0;  // index into nodes of the largest eigenvalue
    double fraction_satisfied = 0.0;  // among non-degenerate nodes

    bool all_satisfied() const { return violated == 0; }
};

struct ScanOptions {
    DyfForm form = DyfForm::Dense;
    double tol = 1e-10;
    double theta_floor = 1e-14;
    StencilOptions stencil;
};

/// Evaluates the condition at every interior node of a surface sampled on
/// scenario.grid.
EllipticityReport scan_surface(const Eigen::MatrixXd& u, const Scenario& scenario, const ScanOptions& options = {});

} // namespace nlbs
