// SPDX-License-Identifier: MIT
#pragma once

#include <functional>
#include <vector>

namespace nlbs {

struct QuadratureResult {
    double value;
    double error;  // estimated absolute error
    double l1 = 0.0;  // integral of |f|
};

/// Adaptive Gauss-Kronrod (15/31) on [a, b]; b may be +infinity. Throws
/// QuadratureError when the estimated error exceeds rel_tol times the L1 norm.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol = 1e-10, unsigned max_depth = 20);

/// Sum of adaptive integrals over [cuts[k], cuts[k+1]]. The last cut may be
/// +infinity. Errors are accumulated and checked once against the total L1
/// norm, so pieces where f is negligible cannot fail on their own.
QuadratureResult integrate_piecewise(const std::function<double(double)>& f, const std::vector<double>& cuts,
                                     double rel_tol = 1e-10, unsigned max_depth = 20);

} // namespace nlbs
