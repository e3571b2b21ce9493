// SPDX-License-Identifier: MIT
#pragma once

#include "nlbs/market_model.hpp"

namespace nlbs {

/// Standard normal CDF. Total on the extended reals.
double norm_cdf(double x);

struct BivariateArgs {
    double a;
    double b;
    double corr;
};

/// M(a, b; corr) = P(X <= a, Y <= b) for standard normals with correlation
/// corr. Infinite limits are resolved exactly. Finite arguments use the
/// Drezner-Wesolowsky / Genz single-integral reduction with a 20-point
/// Gauss-Legendre rule. Throws std::domain_error("degenerate correlation")
/// for |corr| >= 1.
double bivariate_cdf(double a, double b, double corr);
inline double bivariate_cdf(const BivariateArgs& args) {
    return bivariate_cdf(args.a, args.b, args.corr);
}

/// Which closed form to evaluate for the best cash-or-nothing call.
///
/// Standard is the risk-neutral price K e^{-r tau} P(max(S1,S2) >= X) written
/// as K e^{-r tau} [M(y, z1; rho1) + M(-y, z2; rho2)] with
///   y  = (ln(S1/S2) + (sigma2^2 - sigma1^2) tau / 2) / (sigma sqrt(tau)),
///   zi = (ln(Si/X) + (r - sigmai^2 / 2) tau) / (sigmai sqrt(tau)),
///   rho1 = (sigma1 - rho sigma2) / sigma, rho2 = (sigma2 - rho sigma1) / sigma.
///
/// Alternative evaluates the alternative transcription
/// K e^{-r tau} [M(y, z1; -rho1) + M(-y, z2; -rho2)] with +sigma^2/2 drifts,
/// no r in zi and rhoi = (sigmai - rho)/sigma. It does not solve the pricing
/// equation and is kept for comparison only.
enum class CbestForm { Standard, Alternative };

struct CbestIntermediates {
    double y;
    double z1;
    double z2;
    double sigma_comb;
    double rho1;
    double rho2;
};

CbestIntermediates cbest_intermediates(double s1, double s2, double tau, const MarketParams& market,
                                       const PayoffSpec& payoff, CbestForm form = CbestForm::Standard);

/// Price of the two-asset best cash-or-nothing call with time to maturity tau.
/// tau == 0 returns the payoff.
double cbest_price(double s1, double s2, double tau, const MarketParams& market, const PayoffSpec& payoff,
                   CbestForm form = CbestForm::Standard);

inline double cbest_price(double s1, double s2, double tau, const Scenario& scenario,
                          CbestForm form = CbestForm::Standard) {
    return cbest_price(s1, s2, tau, scenario.market, scenario.payoff, form);
}

/// K if max(S1, S2) >= X, else 0.
double payoff(double s1, double s2, const PayoffSpec& spec);

} // namespace nlbs
