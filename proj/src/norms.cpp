// SPDX-License-Identifier: MIT
#include "nlbs/norms.hpp"

#include <Eigen/SVD>

#include <stdexcept>

namespace nlbs {

double matrix_norm(const Eigen::MatrixXd& m, PNorm p, NormKind kind) {
    if (m.size() == 0) return 0.0;
    if (kind == NormKind::Entrywise) {
        switch (p) {
        case PNorm::One: return m.cwiseAbs().sum();
        case PNorm::Two: return m.norm();
        case PNorm::Inf: return m.cwiseAbs().maxCoeff();
        }
    }
    switch (p) {
    case PNorm::One: return m.cwiseAbs().colwise().sum().maxCoeff();
    case PNorm::Inf: return m.cwiseAbs().rowwise().sum().maxCoeff();
    case PNorm::Two: {
        const Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
        return svd.singularValues()(0);
    }
    }
    return 0.0;
}

double pnorm_distance(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v, PNorm p, NormKind kind) {
    if (u.rows() != v.rows() || u.cols() != v.cols())
        throw std::invalid_argument("pnorm_distance: surfaces have different shapes");
    return matrix_norm(u - v, p, kind);
}

ConvergenceRecord convergence_record(std::size_t n, const Eigen::MatrixXd& u, const Eigen::MatrixXd& v,
                                     NormKind kind) {
    if (u.rows() != v.rows() || u.cols() != v.cols())
        throw std::invalid_argument("convergence_record: surfaces have different shapes");
    const Eigen::MatrixXd diff = u - v;
    return {n, matrix_norm(diff, PNorm::One, kind), matrix_norm(diff, PNorm::Two, kind),
            matrix_norm(diff, PNorm::Inf, kind)};
}

} // namespace nlbs
