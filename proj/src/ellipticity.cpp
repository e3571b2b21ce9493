// SPDX-License-Identifier: MIT
#include "nlbs/ellipticity.hpp"

#include "nlbs/error.hpp"
#include "nlbs/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace nlbs {

namespace {

constexpr double kIntegralTol = 1e-9;

// int_0^inf f(y) dy, split at the given kinks so each piece is smooth.
double integrate_half_line(const std::function<double(double)>& f, std::vector<double> cuts) {
    cuts.insert(cuts.begin(), 0.0);
    cuts.push_back(std::numeric_limits<double>::infinity());
    return integrate_piecewise(f, cuts, kIntegralTol).value;
}

} // namespace

CostIntegrals cost_integrals(const CostModel& cost, double theta, double dt) {
    if (!(theta > 0.0) || !(dt > 0.0)) throw std::invalid_argument("cost_integrals: theta and dt must be positive");
    if (const auto* c = std::get_if<ConstantCost>(&cost)) return {0.5 * c->c0, 0.0};

    const double scale = std::sqrt(2.0 * dt * theta);
    if (const auto* c = std::get_if<ExponentialCost>(&cost)) {
        const double c0 = c->c0;
        const double k = c->k;
        const auto f1 = [=](double y) { return c0 * std::exp(-k * scale * y - y * y) * y; };
        const auto f2 = [=](double y) { return -k * c0 * std::exp(-k * scale * y - y * y) * y * y; };
        return {integrate_half_line(f1, {}), k == 0.0 ? 0.0 : integrate_half_line(f2, {})};
    }

    const auto& s = std::get<SampledCost>(cost);
    if (!s.derivative) throw ConfigError("cost.derivative", "cost derivative required");
    constexpr double kTail = 30.0;
    std::vector<double> cuts;
    for (const auto* table : {&s.curve, &*s.derivative})
        for (double xk : table->x)
            if (xk / scale > 0.0 && xk / scale < kTail) cuts.push_back(xk / scale);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const auto f1 = [&](double y) { return s.curve(scale * y) * y * std::exp(-y * y); };
    const auto f2 = [&](double y) { return (*s.derivative)(scale * y) * y * y * std::exp(-y * y); };
    return {integrate_half_line(f1, cuts), integrate_half_line(f2, cuts)};
}

double expected_cost_slope(const CostModel& cost, double theta, double dt) {
    const auto in = cost_integrals(cost, theta, dt);
    return 2.0 * std::numbers::sqrt2 * std::numbers::inv_sqrtpi *
           (0.5 / std::sqrt(theta) * in.i1 + std::sqrt(dt / 2.0) * in.i2);
}

Eigen::MatrixXd dyf_matrix(const DyfInputs& in, DyfForm form, double theta_floor) {
    const auto n = in.B.rows();
    if (in.B.cols() != n || in.A.rows() != n || in.A.cols() != n || in.S.size() != n)
        throw std::invalid_argument("dyf_matrix: dimension mismatch");
    if (!(in.dt > 0.0)) throw std::invalid_argument("dyf_matrix: dt must be positive");

    Eigen::MatrixXd d = -0.5 * in.A;
    if (is_zero_cost(in.cost)) return d;

    const Eigen::MatrixXd ba = in.B * in.A;
    const Eigen::MatrixXd ab = in.A * in.B;
    const double sqrt_dt = std::sqrt(in.dt);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double theta = theta_from_hessian(static_cast<std::size_t>(i), in.B, in.A);
        if (!(theta > theta_floor)) throw NumericalError("theta singular at asset " + std::to_string(i));
        const double w = in.S(i) / sqrt_dt * expected_cost_slope(in.cost, theta, in.dt);
        if (form == DyfForm::Dense) {
            d += w * (ba + ab);
        } else {
            // d(BAB)_ii / dB_lm = delta_il (AB)_mi + delta_im (BA)_il
            d.row(i) += w * ab.col(i).transpose();
            d.col(i) += w * ba.row(i).transpose();
        }
    }
    return d;
}

DefinitenessCheck is_negative_definite(const Eigen::MatrixXd& m, double tol) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
    const double top = eig.eigenvalues().maxCoeff();
    return {top <= tol, top};
}

double leland_number(double sigma, double c0, double dt) {
    if (!(sigma > 0.0) || !(dt > 0.0)) throw std::invalid_argument("leland_number: sigma and dt must be positive");
    return std::numbers::sqrt2 * std::numbers::inv_sqrtpi * c0 / (sigma * std::sqrt(dt));
}

EllipticityReport scan_surface(const Eigen::MatrixXd& u, const Scenario& scenario, const ScanOptions& options) {
    const GridSpec& g = scenario.grid;
    const std::size_t n = g.nodes();
    if (static_cast<std::size_t>(u.rows()) != n || static_cast<std::size_t>(u.cols()) != n)
        throw std::invalid_argument("scan_surface: surface does not match grid");

    // Fail early rather than at the first non-degenerate node.
    if (const auto* s = std::get_if<SampledCost>(&scenario.cost); s && !s->derivative)
        throw ConfigError("cost.derivative", "cost derivative required");

    EllipticityReport report;
    report.nodes.reserve((n - 2) * (n - 2));
    const double h = g.dx();
    double worst = -std::numeric_limits<double>::infinity();

    DyfInputs in;
    in.dt = scenario.dt_tc;
    in.cost = scenario.cost;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        for (std::size_t j = 1; j + 1 < n; ++j) {
            EllipticityNode node;
            node.i = i;
            node.j = j;
            node.s1 = g.price(i);
            node.s2 = g.price(j);
            in.S = Eigen::Vector2d(node.s1, node.s2);

            const auto d = node_derivatives(u, i, j, h, options.stencil);
            Eigen::Matrix2d b = d.hess;
            if (g.coord == Coordinates::LogPrice) {
                // V_SiSj = e^{-x_i - x_j} (V_xixj - delta_ij V_xi)
                b(0, 0) -= d.grad(0);
                b(1, 1) -= d.grad(1);
                b(0, 0) /= node.s1 * node.s1;
                b(1, 1) /= node.s2 * node.s2;
                b(0, 1) /= node.s1 * node.s2;
                b(1, 0) = b(0, 1);
            }
            in.B = b;
            in.A = coefficient_matrix(scenario.market, in.S);

            const bool degenerate = !is_zero_cost(scenario.cost) &&
                                    (theta_from_hessian(0, in.B, in.A) <= options.theta_floor ||
                                     theta_from_hessian(1, in.B, in.A) <= options.theta_floor);
            if (degenerate) {
                node.max_eigenvalue = std::numeric_limits<double>::quiet_NaN();
                node.verdict = NodeVerdict::Degenerate;
                ++report.degenerate;
            } else {
                const auto check = is_negative_definite(dyf_matrix(in, options.form, options.theta_floor), options.tol);
                node.max_eigenvalue = check.max_eigenvalue;
                node.verdict = check.negative_definite ? NodeVerdict::Satisfied : NodeVerdict::Violated;
                ++(check.negative_definite ? report.satisfied : report.violated);
                if (check.max_eigenvalue > worst) {
                    worst = check.max_eigenvalue;
                    report.worst = report.nodes.size();
                }
            }
            report.nodes.push_back(node);
        }
    }
    const std::size_t evaluated = report.satisfied + report.violated;
    report.fraction_satisfied = evaluated > 0 ? static_cast<double>(report.satisfied) / static_cast<double>(evaluated) : 0.0;
    return report;
}

} // namespace nlbs
