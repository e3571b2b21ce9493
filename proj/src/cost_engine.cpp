// SPDX-License-Identifier: MIT
#include "nlbs/cost_engine.hpp"

#include "nlbs/error.hpp"
#include "nlbs/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace nlbs {

namespace {

constexpr double kSqrtTwoOverPi = std::numbers::sqrt2 * std::numbers::inv_sqrtpi;
constexpr double kSampledRelTol = 1e-8;

double std_normal_pdf(double y) {
    return std::exp(-0.5 * y * y) / std::sqrt(2.0 * std::numbers::pi);
}

template <class Hess, class Grad, class Coords, class Kernel>
double theta_log_impl(std::size_t i, const Hess& hess, const Grad& grad, const Coords& x, const Kernel& kernel) {
    const auto n = hess.rows();
    double sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double wj = hess(i, j) - (static_cast<std::size_t>(j) == i ? grad(i) : 0.0);
        if (wj == 0.0) continue;
        for (Eigen::Index k = 0; k < n; ++k) {
            const double wk = hess(i, k) - (static_cast<std::size_t>(k) == i ? grad(i) : 0.0);
            sum += wj * wk * kernel(j, k);
        }
    }
    return std::max(0.0, std::exp(-2.0 * x(i)) * sum);
}

// Sampled model: E = sqrt(theta) * int_0^inf C(sqrt(dt theta) y) y 2 phi(y) dy,
// split at the table breakpoints so every piece has a smooth integrand.
double sampled_expected_cost(const SampledCost& cost, double theta, double dt) {
    const double scale = std::sqrt(dt * theta);
    constexpr double kTail = 40.0;  // 2 phi(40) underflows

    std::vector<double> cuts{0.0};
    for (double xk : cost.curve.x) {
        const double yk = xk / scale;
        if (yk > cuts.back() && yk < kTail) cuts.push_back(yk);
    }

    const auto body = integrate_piecewise(
        [&](double y) { return cost.curve(scale * y) * y * 2.0 * std_normal_pdf(y); }, cuts, kSampledRelTol);
    // Beyond the last cut C is constant: int_c^inf y 2 phi(y) dy = 2 phi(c).
    const double value = body.value + cost.curve.y.back() * 2.0 * std_normal_pdf(cuts.back());

    if (value > 0.0 && body.error > kSampledRelTol * value)
        throw QuadratureError("sampled expected cost", body.error / value);
    return std::sqrt(theta) * value;
}

} // namespace

double mixed_difference(const Eigen::MatrixXd& u, std::size_t i, std::size_t j, double h, MixedStencil kind) {
    const double denom = 4.0 * h * h;
    if (kind == MixedStencil::FourCorner)
        return (u(i + 1, j + 1) + u(i - 1, j - 1) - u(i + 1, j - 1) - u(i - 1, j + 1)) / denom;
    return (u(i + 1, j + 1) + u(i - 1, j - 1) - u(i - 1, j) - u(i, j - 1)) / denom;
}

NodeDerivatives node_derivatives(const Eigen::MatrixXd& u, std::size_t i, std::size_t j, double h,
                                 const StencilOptions& stencil) {
    NodeDerivatives d;
    const double c = u(i, j);
    if (stencil.first == FirstDifference::Forward) {
        d.grad(0) = (u(i + 1, j) - c) / h;
        d.grad(1) = (u(i, j + 1) - c) / h;
    } else {
        d.grad(0) = (u(i + 1, j) - u(i - 1, j)) / (2.0 * h);
        d.grad(1) = (u(i, j + 1) - u(i, j - 1)) / (2.0 * h);
    }
    const double h2 = h * h;
    d.hess(0, 0) = (u(i + 1, j) - 2.0 * c + u(i - 1, j)) / h2;
    d.hess(1, 1) = (u(i, j + 1) - 2.0 * c + u(i, j - 1)) / h2;
    d.hess(0, 1) = d.hess(1, 0) = mixed_difference(u, i, j, h, stencil.mixed);
    return d;
}

Eigen::MatrixXd coefficient_matrix(const MarketParams& market, const Eigen::VectorXd& prices) {
    if (prices.size() != market.sigmas.size())
        throw std::invalid_argument("coefficient_matrix: price vector has the wrong dimension");
    const Eigen::VectorXd scaled = market.sigmas.cwiseProduct(prices);
    return market.rho.cwiseProduct(scaled * scaled.transpose());
}

Eigen::MatrixXd log_coefficient_matrix(const MarketParams& market) {
    return market.rho.cwiseProduct(market.sigmas * market.sigmas.transpose());
}

double theta_from_hessian(std::size_t i, const Eigen::MatrixXd& hessian, const Eigen::MatrixXd& coeff) {
    const auto n = hessian.rows();
    if (hessian.cols() != n || coeff.rows() != n || coeff.cols() != n || static_cast<Eigen::Index>(i) >= n)
        throw std::invalid_argument("theta_from_hessian: dimension mismatch");
    const Eigen::RowVectorXd row = hessian.row(static_cast<Eigen::Index>(i));
    return row * coeff * row.transpose();
}

double theta_log_coords(std::size_t i, const Eigen::MatrixXd& hess_x, const Eigen::VectorXd& grad_x,
                        const Eigen::VectorXd& x, const MarketParams& market) {
    const auto n = static_cast<Eigen::Index>(market.dim());
    if (hess_x.rows() != n || hess_x.cols() != n || grad_x.size() != n || x.size() != n ||
        static_cast<Eigen::Index>(i) >= n)
        throw std::invalid_argument("theta_log_coords: dimension mismatch");
    const auto kernel = [&](Eigen::Index j, Eigen::Index k) {
        return market.sigmas(j) * market.sigmas(k) * market.rho(j, k);
    };
    return theta_log_impl(i, hess_x, grad_x, x, kernel);
}

double erfcx(double x) {
    if (x < 25.0) return std::exp(x * x) * std::erfc(x);
    // Asymptotic series 1/(x sqrt(pi)) sum (-1)^n (2n-1)!! / (2x^2)^n.
    const double inv = 1.0 / (2.0 * x * x);
    double term = 1.0;
    double sum = 1.0;
    for (int n = 1; n < 12; ++n) {
        term *= -(2.0 * n - 1.0) * inv;
        sum += term;
    }
    return sum * std::numbers::inv_sqrtpi / x;
}

double exponential_bracket(double a) {
    if (a <= 0.0) return 1.0;
    if (a < 30.0) {
        const double mills = std::sqrt(std::numbers::pi / 2.0) * erfcx(a / std::numbers::sqrt2);
        return 1.0 - a * mills;
    }
    // 1 - a m(a) = sum_{n>=1} (-1)^{n+1} (2n-1)!! / a^{2n}
    const double inv2 = 1.0 / (a * a);
    double term = inv2;
    double sum = term;
    for (int n = 2; n < 12; ++n) {
        term *= -(2.0 * n - 1.0) * inv2;
        sum += term;
    }
    return sum;
}

double expected_cost(const CostModel& cost, double theta, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("expected_cost: dt must be positive");
    if (!(theta > 0.0)) return 0.0;

    if (const auto* c = std::get_if<ConstantCost>(&cost)) return c->c0 * kSqrtTwoOverPi * std::sqrt(theta);
    if (const auto* c = std::get_if<ExponentialCost>(&cost)) {
        return c->c0 * kSqrtTwoOverPi * std::sqrt(theta) * exponential_bracket(c->k * std::sqrt(dt * theta));
    }
    return sampled_expected_cost(std::get<SampledCost>(cost), theta, dt);
}

double node_cost(const CostModel& cost, const Eigen::VectorXd& thetas, const Eigen::VectorXd& prices, double dt,
                 const CostOptions& options) {
    const double denom = options.prefactor == Prefactor::SqrtDt ? std::sqrt(dt) : dt;
    double g = 0.0;
    for (Eigen::Index i = 0; i < thetas.size(); ++i) g += prices(i) / denom * expected_cost(cost, thetas(i), dt);
    return g;
}

double nonlinear_operator(const Eigen::MatrixXd& hessian, const Eigen::VectorXd& grad, double value,
                          const Eigen::VectorXd& prices, const MarketParams& market, const CostModel& cost,
                          double dt, const CostOptions& options) {
    const Eigen::MatrixXd coeff = coefficient_matrix(market, prices);
    Eigen::VectorXd thetas(prices.size());
    for (Eigen::Index i = 0; i < prices.size(); ++i)
        thetas(i) = theta_from_hessian(static_cast<std::size_t>(i), hessian, coeff);
    return -0.5 * (coeff * hessian).trace() - market.r * grad.dot(prices) + market.r * value +
           node_cost(cost, thetas, prices, dt, options);
}

ThetaField theta_field(const Eigen::MatrixXd& u, const GridSpec& grid, const MarketParams& market,
                       const StencilOptions& stencil) {
    const auto n = grid.nodes();
    if (static_cast<std::size_t>(u.rows()) != n || static_cast<std::size_t>(u.cols()) != n)
        throw std::invalid_argument("theta_field: surface does not match grid");

    ThetaField out;
    for (auto& t : out.theta) t = Eigen::MatrixXd::Zero(u.rows(), u.cols());

    const double h = grid.dx();
    const Eigen::Matrix2d kernel = log_coefficient_matrix(market);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        for (std::size_t j = 1; j + 1 < n; ++j) {
            const auto d = node_derivatives(u, i, j, h, stencil);
            if (grid.coord == Coordinates::LogPrice) {
                const Eigen::Vector2d x(grid.coordinate(i), grid.coordinate(j));
                const auto k = [&](Eigen::Index a, Eigen::Index b) { return kernel(a, b); };
                out.theta[0](i, j) = theta_log_impl(0, d.hess, d.grad, x, k);
                out.theta[1](i, j) = theta_log_impl(1, d.hess, d.grad, x, k);
            } else {
                const Eigen::Vector2d s(grid.price(i), grid.price(j));
                const Eigen::Matrix2d coeff = kernel.cwiseProduct(s * s.transpose());
                out.theta[0](i, j) = d.hess.row(0) * coeff * d.hess.row(0).transpose();
                out.theta[1](i, j) = d.hess.row(1) * coeff * d.hess.row(1).transpose();
            }
        }
    }
    return out;
}

CostField assemble_G(const ThetaField& thetas, const GridSpec& grid, const Scenario& scenario,
                     const CostOptions& options) {
    const auto n = grid.nodes();
    CostField g = CostField::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    if (is_zero_cost(scenario.cost)) return g;

    const double dt = scenario.dt_tc;
    const double denom = options.prefactor == Prefactor::SqrtDt ? std::sqrt(dt) : dt;
    std::vector<double> prices(n);
    for (std::size_t i = 0; i < n; ++i) prices[i] = grid.price(i);

    for (std::size_t i = 1; i + 1 < n; ++i) {
        for (std::size_t j = 1; j + 1 < n; ++j) {
            g(i, j) = prices[i] / denom * expected_cost(scenario.cost, thetas.theta[0](i, j), dt) +
                      prices[j] / denom * expected_cost(scenario.cost, thetas.theta[1](i, j), dt);
        }
    }
    return g;
}

CostField assemble_G(const Eigen::MatrixXd& u, const Scenario& scenario, const StencilOptions& stencil,
                     const CostOptions& options) {
    if (is_zero_cost(scenario.cost)) {
        return CostField::Zero(u.rows(), u.cols());
    }
    return assemble_G(theta_field(u, scenario.grid, scenario.market, stencil), scenario.grid, scenario, options);
}

} // namespace nlbs
