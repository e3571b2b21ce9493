// SPDX-License-Identifier: MIT
#pragma once

#include "nlbs/grid.hpp"
#include "nlbs/market_model.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>

namespace nlbs {

// ---------------------------------------------------------------------------
// Finite-difference stencils shared by the ADI stages and the cost term.
// ---------------------------------------------------------------------------

enum class MixedStencil {
    FourCorner,     // (U[i+1,j+1] + U[i-1,j-1] - U[i+1,j-1] - U[i-1,j+1]) / 4h^2
    Skewed,         // (U[i+1,j+1] + U[i-1,j-1] - U[i-1,j] - U[i,j-1]) / 4h^2, not consistent
};

enum class FirstDifference { Forward, Central };

struct StencilOptions {
    MixedStencil mixed = MixedStencil::FourCorner;
    FirstDifference first = FirstDifference::Forward;
};

double mixed_difference(const Eigen::MatrixXd& u, std::size_t i, std::size_t j, double h, MixedStencil kind);

struct NodeDerivatives {
    Eigen::Vector2d grad;
    Eigen::Matrix2d hess;
};

/// Derivatives of a grid function at interior node (i, j) in grid coordinates.
NodeDerivatives node_derivatives(const Eigen::MatrixXd& u, std::size_t i, std::size_t j, double h,
                                 const StencilOptions& stencil);

// ---------------------------------------------------------------------------
// Quadratic forms
// ---------------------------------------------------------------------------

/// (A)_ij = sigma_i sigma_j rho_ij S_i S_j.
Eigen::MatrixXd coefficient_matrix(const MarketParams& market, const Eigen::VectorXd& prices);

/// Constant-coefficient analogue sigma_i sigma_j rho_ij used in log prices.
Eigen::MatrixXd log_coefficient_matrix(const MarketParams& market);

/// Theta_i = (B A B)_ii for Hessian B (price coordinates).
double theta_from_hessian(std::size_t i, const Eigen::MatrixXd& hessian, const Eigen::MatrixXd& coeff);

/// Theta_i from derivatives in log prices x = ln S:
///   e^{-2 x_i} sum_{j,k} W_ij W_ik sigma_j sigma_k rho_jk,  W_ij = V_ij - delta_ij V_i.
/// Roundoff below zero is clamped.
double theta_log_coords(std::size_t i, const Eigen::MatrixXd& hess_x, const Eigen::VectorXd& grad_x,
                        const Eigen::VectorXd& x, const MarketParams& market);

// ---------------------------------------------------------------------------
// Expected transaction cost
// ---------------------------------------------------------------------------

/// E[C(sqrt(dt) |Phi|) |Phi|] for Phi ~ N(0, theta).
///   Constant:    C0 sqrt(2 theta / pi)
///   Exponential: C0 sqrt(2 theta / pi) * bracket(k sqrt(dt theta))
///   Sampled:     adaptive quadrature to relative 1e-8
double expected_cost(const CostModel& cost, double theta, double dt);

/// 1 - sqrt(pi/2) a e^{a^2/2} erfc(a / sqrt 2) = E[e^{-aY} Y] / E[Y] for
/// half-normal Y. Lies in (0, 1], decreasing in a.
double exponential_bracket(double a);

/// e^{x^2} erfc(x), stable for large x.
double erfcx(double x);

enum class Prefactor {
    SqrtDt,         // S_i / sqrt(dt)
    InverseDt,      // S_i / dt
};

struct CostOptions {
    Prefactor prefactor = Prefactor::SqrtDt;
};

/// G at one node: sum_i prefactor(S_i) * expected_cost(Theta_i).
double node_cost(const CostModel& cost, const Eigen::VectorXd& thetas, const Eigen::VectorXd& prices, double dt,
                 const CostOptions& options = {});

/// Full nonlinear spatial operator in price coordinates,
///   F = -1/2 tr(A B) - r grad.S + r value + G(S, B).
double nonlinear_operator(const Eigen::MatrixXd& hessian, const Eigen::VectorXd& grad, double value,
                          const Eigen::VectorXd& prices, const MarketParams& market, const CostModel& cost,
                          double dt, const CostOptions& options = {});

// ---------------------------------------------------------------------------
// Field assembly
// ---------------------------------------------------------------------------

struct ThetaField {
    std::array<Eigen::MatrixXd, 2> theta;  // per asset, per node
};

using CostField = Eigen::MatrixXd;

/// Theta_1, Theta_2 at every interior node; the outer ring is left at zero.
ThetaField theta_field(const Eigen::MatrixXd& u, const GridSpec& grid, const MarketParams& market,
                       const StencilOptions& stencil = {});

/// G at every node; zero on the outer ring.
CostField assemble_G(const ThetaField& thetas, const GridSpec& grid, const Scenario& scenario,
                     const CostOptions& options = {});

CostField assemble_G(const Eigen::MatrixXd& u, const Scenario& scenario, const StencilOptions& stencil = {},
                     const CostOptions& options = {});

} // namespace nlbs
