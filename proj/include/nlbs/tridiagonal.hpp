// SPDX-License-Identifier: MIT
#pragma once

#include <span>
#include <vector>

namespace nlbs {

/// Tridiagonal system with bands indexed by row: lower[0] and upper[n-1]
/// are ignored.
struct TridiagonalSystem {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;
    std::vector<double> rhs;
};

/// Thomas algorithm without pivoting. Throws NumericalError naming the row
/// when an eliminated pivot vanishes.
std::vector<double> thomas_solve(const TridiagonalSystem& sys);

/// Allocation-free variant: solves in place into `x`, using `scratch`
/// (size n) for the modified upper band.
void thomas_solve(std::span<const double> lower, std::span<const double> diag, std::span<const double> upper,
                  std::span<const double> rhs, std::span<double> x, std::span<double> scratch);

} // namespace nlbs
