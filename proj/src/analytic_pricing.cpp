// SPDX-License-Identifier: MIT
#include "nlbs/analytic_pricing.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nlbs {

namespace {

using Legendre20 = boost::math::quadrature::gauss<double, 20>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Upper-orthant probability P(X > h, Y > k) for finite h, k and |r| < 1.
// Genz's BVND reduction, always with the 20-point rule.
double upper_orthant(double h, double k, double r) {
    const auto& nodes = Legendre20::abscissa();
    const auto& weights = Legendre20::weights();

    double hk = h * k;
    double bvn = 0.0;

    if (std::abs(r) < 0.925) {
        const double hs = (h * h + k * k) / 2.0;
        const double asr = std::asin(r);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            for (const double sign : {-1.0, 1.0}) {
                const double sn = std::sin(asr * (sign * nodes[i] + 1.0) / 2.0);
                bvn += weights[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
            }
        }
        return bvn * asr / (2.0 * kTwoPi) + norm_cdf(-h) * norm_cdf(-k);
    }

    if (r < 0.0) {
        k = -k;
        hk = -hk;
    }
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    bvn = a * std::exp(-(bs / as + hk) / 2.0) *
          (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    if (hk > -160.0) {
        const double b = std::sqrt(bs);
        bvn -= std::exp(-hk / 2.0) * std::sqrt(kTwoPi) * norm_cdf(-b / a) * b *
               (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        double xs = (a * (1.0 - nodes[i])) * (a * (1.0 - nodes[i]));
        double rs = std::sqrt(1.0 - xs);
        bvn += a * weights[i] *
               (std::exp(-bs / (2.0 * xs) - hk / (1.0 + rs)) / rs -
                std::exp(-(bs / xs + hk) / 2.0) * (1.0 + c * xs * (1.0 + d * xs)));
        xs = as * (1.0 + nodes[i]) * (1.0 + nodes[i]) / 4.0;
        rs = std::sqrt(1.0 - xs);
        bvn += a * weights[i] * std::exp(-(bs / xs + hk) / 2.0) *
               (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs - (1.0 + c * xs * (1.0 + d * xs)));
    }
    bvn = -bvn / kTwoPi;

    if (r > 0.0) return bvn + norm_cdf(-std::max(h, k));
    return -bvn + std::max(0.0, norm_cdf(-h) - norm_cdf(-k));
}

// M(a, b; +-1) limits, for the perfectly correlated markets.
double bivariate_cdf_limit(double a, double b, double corr) {
    if (corr > 0.0) return norm_cdf(std::min(a, b));
    return std::max(0.0, norm_cdf(a) + norm_cdf(b) - 1.0);
}

double bivariate_or_limit(double a, double b, double corr) {
    if (std::abs(corr) >= 1.0) return bivariate_cdf_limit(a, b, corr);
    return bivariate_cdf(a, b, corr);
}

} // namespace

double norm_cdf(double x) {
    if (std::isinf(x)) return x > 0.0 ? 1.0 : 0.0;
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double bivariate_cdf(double a, double b, double corr) {
    if (std::isnan(a) || std::isnan(b) || std::isnan(corr))
        throw std::domain_error("bivariate_cdf: NaN argument");
    if (!(std::abs(corr) < 1.0)) throw std::domain_error("degenerate correlation");

    if (a == -INFINITY || b == -INFINITY) return 0.0;
    if (a == INFINITY) return norm_cdf(b);
    if (b == INFINITY) return norm_cdf(a);

    const double p = upper_orthant(-a, -b, corr);
    return std::clamp(p, 0.0, 1.0);
}

CbestIntermediates cbest_intermediates(double s1, double s2, double tau, const MarketParams& market,
                                       const PayoffSpec& payoff, CbestForm form) {
    const double sig1 = market.sigmas[0];
    const double sig2 = market.sigmas[1];
    const double rho = market.rho(0, 1);
    const double sqrt_tau = std::sqrt(tau);
    const double var = sig1 * sig1 + sig2 * sig2 - 2.0 * sig1 * sig2 * rho;
    const double sigma = std::sqrt(std::max(var, 0.0));

    CbestIntermediates out{};
    out.sigma_comb = sigma;
    const double log_ratio = std::log(s1 / s2);

    if (form == CbestForm::Standard) {
        const double drift = (sig2 * sig2 - sig1 * sig1) * tau / 2.0;
        out.y = sigma > 0.0 ? (log_ratio + drift) / (sigma * sqrt_tau)
                            : (log_ratio > 0.0 ? INFINITY : (log_ratio < 0.0 ? -INFINITY : 0.0));
        out.z1 = (std::log(s1 / payoff.strike) + (market.r - sig1 * sig1 / 2.0) * tau) / (sig1 * sqrt_tau);
        out.z2 = (std::log(s2 / payoff.strike) + (market.r - sig2 * sig2 / 2.0) * tau) / (sig2 * sqrt_tau);
        out.rho1 = sigma > 0.0 ? (sig1 - rho * sig2) / sigma : 0.0;
        out.rho2 = sigma > 0.0 ? (sig2 - rho * sig1) / sigma : 0.0;
    } else {
        out.y = sigma > 0.0 ? (log_ratio + sigma * sigma / 2.0 * tau) / (sigma * sqrt_tau)
                            : (log_ratio > 0.0 ? INFINITY : (log_ratio < 0.0 ? -INFINITY : 0.0));
        out.z1 = (std::log(s1 / payoff.strike) + sig1 * sig1 / 2.0 * tau) / (sig1 * sqrt_tau);
        out.z2 = (std::log(s2 / payoff.strike) + sig2 * sig2 / 2.0 * tau) / (sig2 * sqrt_tau);
        out.rho1 = sigma > 0.0 ? (sig1 - rho) / sigma : 0.0;
        out.rho2 = sigma > 0.0 ? (sig2 - rho) / sigma : 0.0;
    }
    return out;
}

double cbest_price(double s1, double s2, double tau, const MarketParams& market, const PayoffSpec& spec,
                   CbestForm form) {
    if (!(s1 > 0.0) || !(s2 > 0.0)) throw std::invalid_argument("cbest_price: prices must be positive");
    if (!(tau >= 0.0) || tau > market.T * (1.0 + 1e-12))
        throw std::invalid_argument("cbest_price: tau outside [0, T]");
    if (tau == 0.0) return payoff(s1, s2, spec);

    const auto v = cbest_intermediates(s1, s2, tau, market, spec, form);
    const double discount = spec.cash * std::exp(-market.r * tau);

    if (v.sigma_comb == 0.0) {
        // Identical dynamics: the ordering of S1 and S2 never changes.
        const double z = v.y > 0.0 ? v.z1 : (v.y < 0.0 ? v.z2 : std::max(v.z1, v.z2));
        return discount * norm_cdf(z);
    }

    double prob = 0.0;
    if (form == CbestForm::Standard) {
        prob = bivariate_or_limit(v.y, v.z1, v.rho1) + bivariate_or_limit(-v.y, v.z2, v.rho2);
    } else {
        prob = bivariate_cdf(v.y, v.z1, -v.rho1) + bivariate_cdf(-v.y, v.z2, -v.rho2);
    }
    return discount * prob;
}

double payoff(double s1, double s2, const PayoffSpec& spec) {
    return std::max(s1, s2) >= spec.strike ? spec.cash : 0.0;
}

} // namespace nlbs
