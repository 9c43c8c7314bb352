#include "flowkl/spectral.hpp"

#include "flowkl/covariance.hpp"
#include "flowkl/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace flowkl {

namespace {

void require_count(Index J, Index bound, const char* what) {
    if (J < 0 || J > bound) {
        throw ArgumentError(std::string(what) + ": J = " + std::to_string(J) + " outside [0, " +
                            std::to_string(bound) + "]");
    }
}

double largest_singular_value(const MatrixXd& a) {
    if (a.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<MatrixXd> svd(a);
    return svd.singularValues()(0);
}

} // namespace

void normalize_signs(MatrixXd& vectors) {
    for (Index c = 0; c < vectors.cols(); ++c) {
        Index arg = 0;
        vectors.col(c).cwiseAbs().maxCoeff(&arg);
        if (vectors(arg, c) < 0.0) {
            vectors.col(c) = -vectors.col(c);
        }
    }
}

EigenSystem naive_eigendecomposition(const DiscreteKernel& kernel, Index J, double negative_tol) {
    const Index d = kernel.assembly().rows();
    require_count(J, d, "naive_eigendecomposition");
    const double w = kernel.grid().weight();

    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(w * kernel.assembly());
    if (solver.info() != Eigen::Success) {
        throw Error("symmetric eigensolver did not converge");
    }
    // Eigen sorts ascending.
    const VectorXd& ascending = solver.eigenvalues();
    const double top = ascending(d - 1);
    const double tol = negative_tol * std::max(top, 0.0);
    if (ascending(0) < -tol) {
        throw NotPsdError("kernel has eigenvalue " + std::to_string(ascending(0)) + " below -" +
                          std::to_string(tol));
    }

    VectorXd values(J);
    MatrixXd flows(d, J);
    const double inv_root_w = 1.0 / std::sqrt(w);
    for (Index j = 0; j < J; ++j) {
        values(j) = std::max(ascending(d - 1 - j), 0.0);
        flows.col(j) = inv_root_w * solver.eigenvectors().col(d - 1 - j);
    }
    normalize_signs(flows);
    return EigenSystem(kernel.grid(), kernel.trunc(), std::move(values), std::move(flows));
}

EigenSystem svd_fast_path(const FlowEnsemble& ens, Index J, bool center) {
    if (center) {
        return svd_fast_path(centered(ens), J, false);
    }
    const Index d = ens.dim();
    require_count(J, std::min(d, ens.size()), "svd_fast_path");
    if (J == 0) {
        return EigenSystem(ens.grid(), ens.trunc(), VectorXd(0), MatrixXd(d, 0));
    }
    const double w = ens.grid().weight();
    Eigen::BDCSVD<MatrixXd> svd(ens.data(), Eigen::ComputeThinU);
    if (svd.info() != Eigen::Success) {
        throw Error("SVD did not converge");
    }
    const VectorXd& sigma = svd.singularValues();
    const double scale = w / static_cast<double>(ens.size());
    VectorXd values = scale * sigma.head(J).array().square().matrix();
    MatrixXd flows = svd.matrixU().leftCols(J) / std::sqrt(w);
    normalize_signs(flows);
    return EigenSystem(ens.grid(), ens.trunc(), std::move(values), std::move(flows));
}

CrossValidationReport compare_eigensystems(const EigenSystem& reference, const EigenSystem& candidate,
                                           double cluster_tol, std::optional<double> next_eigenvalue) {
    require_same_discretization(reference.grid(), reference.trunc(), candidate.grid(), candidate.trunc(),
                                "compare_eigensystems");
    if (reference.count() != candidate.count()) {
        throw DimensionError("eigensystems to compare have different counts");
    }
    const Index J = reference.count();
    const double w = reference.grid().weight();
    const VectorXd& ref = reference.eigenvalues();
    const VectorXd& cand = candidate.eigenvalues();

    CrossValidationReport report;
    report.J = J;
    if (J == 0) {
        return report;
    }
    const double top = ref(0);
    const double denom = top > 0.0 ? top : 1.0;
    report.max_eigval_rel_err = ((ref - cand).cwiseAbs() / denom).maxCoeff();

    const double gap_tol = cluster_tol * std::max(top, 0.0);
    Index first = 0;
    while (first < J) {
        Index last = first;
        while (last + 1 < J && ref(last) - ref(last + 1) <= gap_tol) {
            ++last;
        }
        const bool cut = last == J - 1 && next_eigenvalue.has_value() && ref(last) - *next_eigenvalue <= gap_tol;
        if (cut) {
            report.clusters.push_back(EigenCluster{first, last, true, 0.0});
            report.flagged = true;
        } else if (first == last) {
            const double align = std::abs(w * reference.eigenflows().col(first).dot(candidate.eigenflows().col(first)));
            report.min_abs_alignment = std::min(report.min_abs_alignment, align);
            ++report.simple_count;
        } else {
            const Index size = last - first + 1;
            const MatrixXd a = std::sqrt(w) * reference.eigenflows().middleCols(first, size);
            const MatrixXd b = std::sqrt(w) * candidate.eigenflows().middleCols(first, size);
            // sin of the largest principal angle = ||(I - A A^T) B||_2.
            const double s = largest_singular_value(b - a * (a.transpose() * b));
            const double angle = std::asin(std::min(1.0, s));
            report.clusters.push_back(EigenCluster{first, last, false, angle});
            report.max_cluster_angle = std::max(report.max_cluster_angle, angle);
        }
        first = last + 1;
    }
    return report;
}

CrossValidationReport cross_validate_paths(const FlowEnsemble& ens, Index J, double cluster_tol) {
    require_count(J, std::min(ens.dim(), ens.size()), "cross_validate_paths");
    if (J == 0) {
        return CrossValidationReport{};
    }
    const DiscreteKernel kernel = empirical_operator_kernel(ens);
    const Index peek = std::min(J + 1, ens.dim());
    const EigenSystem naive_full = naive_eigendecomposition(kernel, peek);
    const EigenSystem naive(naive_full.grid(), naive_full.trunc(), naive_full.eigenvalues().head(J),
                            naive_full.eigenflows().leftCols(J));
    std::optional<double> next;
    if (peek > J) {
        next = naive_full.eigenvalues()(J);
    }
    return compare_eigensystems(naive, svd_fast_path(ens, J), cluster_tol, next);
}

ScoreMatrix compute_scores(const FlowEnsemble& ens, const EigenSystem& eig) {
    require_same_discretization(ens.grid(), ens.trunc(), eig.grid(), eig.trunc(), "compute_scores");
    return ScoreMatrix{ens.grid().weight() * (ens.data().transpose() * eig.eigenflows())};
}

} // namespace flowkl
