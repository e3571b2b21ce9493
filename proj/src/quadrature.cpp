// SPDX-License-Identifier: MIT
#include "nlbs/quadrature.hpp"

#include "nlbs/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

namespace nlbs {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;

QuadratureResult raw_integral(const std::function<double(double)>& f, double a, double b, double rel_tol,
                              unsigned max_depth) {
    QuadratureResult r{0.0, 0.0, 0.0};
    r.value = Rule::integrate(f, a, b, max_depth, rel_tol, &r.error, &r.l1);
    return r;
}

void check(const QuadratureResult& r, double rel_tol) {
    // Relative to the L1 norm so that integrands with cancellation still converge.
    const double scale = r.l1 > 0.0 ? r.l1 : 1.0;
    if (!std::isfinite(r.value) || r.error > rel_tol * scale)
        throw QuadratureError("adaptive quadrature did not converge", r.error / scale);
}

} // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol, unsigned max_depth) {
    const auto r = raw_integral(f, a, b, rel_tol, max_depth);
    check(r, rel_tol);
    return r;
}

QuadratureResult integrate_piecewise(const std::function<double(double)>& f, const std::vector<double>& cuts,
                                     double rel_tol, unsigned max_depth) {
    QuadratureResult total{0.0, 0.0, 0.0};
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        if (!(cuts[p + 1] > cuts[p])) continue;
        const double width = cuts[p + 1] - cuts[p];
        if (width < 1e-9 * std::max(1.0, std::abs(cuts[p]))) {
            // Sliver between two nearly coincident cuts: the error estimate of
            // the rule is unreliable there, so take the midpoint value.
            const double v = f(cuts[p] + 0.5 * width) * width;
            total.value += v;
            total.error += std::abs(v) * 1e-6;
            total.l1 += std::abs(v);
            continue;
        }
        const auto r = raw_integral(f, cuts[p], cuts[p + 1], 0.1 * rel_tol, max_depth);
        total.value += r.value;
        total.error += r.error;
        total.l1 += r.l1;
    }
    check(total, rel_tol);
    return total;
}

} // namespace nlbs
