// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace nlbs {

enum class PNorm { One, Two, Inf };

/// Induced operator norms (max column sum, spectral norm, max row sum) or
/// the entrywise vector norms of the flattened matrix.
enum class NormKind { Induced, Entrywise };

double matrix_norm(const Eigen::MatrixXd& m, PNorm p, NormKind kind = NormKind::Induced);

/// ||u - v||_p. Throws std::invalid_argument on a shape mismatch.
double pnorm_distance(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v, PNorm p,
                      NormKind kind = NormKind::Induced);

/// One row of a convergence table: distances between consecutive iterates.
struct ConvergenceRecord {
    std::size_t n = 0;
    double d1 = 0.0;
    double d2 = 0.0;
    double dinf = 0.0;
};

ConvergenceRecord convergence_record(std::size_t n, const Eigen::MatrixXd& u, const Eigen::MatrixXd& v,
                                     NormKind kind = NormKind::Induced);

} // namespace nlbs
