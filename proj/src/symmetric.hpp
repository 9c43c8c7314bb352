#pragma once

#include "flowkl/model.hpp"

namespace flowkl::detail {

/// Copies the lower triangle onto the upper one.
inline MatrixXd mirror_lower(MatrixXd a) {
    for (Index c = 1; c < a.cols(); ++c) {
        for (Index r = 0; r < c; ++r) {
            a(r, c) = a(c, r);
        }
    }
    return a;
}

/// alpha * B B^T, exactly symmetric.
inline MatrixXd gram_outer(const Eigen::Ref<const MatrixXd>& b, double alpha = 1.0) {
    MatrixXd out = MatrixXd::Zero(b.rows(), b.rows());
    if (b.cols() == 0) {
        return out; // Eigen's blocking heuristic divides by the inner size
    }
    out.selfadjointView<Eigen::Lower>().rankUpdate(b, alpha);
    return mirror_lower(std::move(out));
}

} // namespace flowkl::detail
