// SPDX-License-Identifier: MIT
#include "nlbs/tridiagonal.hpp"

#include "nlbs/error.hpp"

#include <cmath>
#include <string>

namespace nlbs {

void thomas_solve(std::span<const double> lower, std::span<const double> diag, std::span<const double> upper,
                  std::span<const double> rhs, std::span<double> x, std::span<double> scratch) {
    const std::size_t n = diag.size();
    if (lower.size() != n || upper.size() != n || rhs.size() != n || x.size() != n || scratch.size() < n)
        throw std::invalid_argument("thomas_solve: band lengths differ");
    if (n == 0) return;

    auto pivot_check = [](double p, std::size_t row) {
        if (p == 0.0 || !std::isfinite(p))
            throw NumericalError("thomas_solve: zero pivot at row " + std::to_string(row));
    };

    double pivot = diag[0];
    pivot_check(pivot, 0);
    scratch[0] = upper[0] / pivot;
    x[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = diag[i] - lower[i] * scratch[i - 1];
        pivot_check(pivot, i);
        scratch[i] = upper[i] / pivot;
        x[i] = (rhs[i] - lower[i] * x[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= scratch[i] * x[i + 1];
}

std::vector<double> thomas_solve(const TridiagonalSystem& sys) {
    std::vector<double> x(sys.diag.size());
    std::vector<double> scratch(sys.diag.size());
    thomas_solve(sys.lower, sys.diag, sys.upper, sys.rhs, x, scratch);
    return x;
}

} // namespace nlbs
