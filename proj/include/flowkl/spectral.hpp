#pragma once

// Two routes to the eigensystem of the discretized covariance operator.
//
// Both apply the quadrature weight explicitly: eigenpairs (lambda, u) of the
// symmetric matrix w K give eigenflows Phi = w^{-1/2} unstack(u), which are
// orthonormal under the quadrature inner product. For the SVD route with
// X = U D V^T this reads lambda_j = w d_j^2 / N and Phi_j = w^{-1/2} u_j.
// Each eigenflow's sign is fixed so that its largest-magnitude coefficient
// is positive.

#include "flowkl/model.hpp"

#include <optional>
#include <vector>

namespace flowkl {

/// Dense symmetric eigensolve of w K. Eigenvalues in [-tol, 0) with
/// tol = negative_tol * lambda_1 are reported as 0; anything below throws
/// NotPsdError.
EigenSystem naive_eigendecomposition(const DiscreteKernel& kernel, Index J, double negative_tol = 1e-8);

/// Thin SVD of the data matrix; requires J <= min(m n, N).
EigenSystem svd_fast_path(const FlowEnsemble& ens, Index J, bool center = false);

struct EigenCluster {
    Index first = 0;
    Index last = 0;
    /// The cluster continues past index J - 1, so the two paths may return
    /// different subspaces of it; no comparison is made.
    bool cut_by_truncation = false;
    /// Largest principal angle between the two paths' cluster subspaces.
    double principal_angle = 0.0;
};

struct CrossValidationReport {
    Index J = 0;
    /// max_j |lambda_j^naive - lambda_j^svd| / lambda_1^naive
    double max_eigval_rel_err = 0.0;
    /// min over simple eigenvalues of |<Phi_j^naive, Phi_j^svd>|; 1 when there are none.
    double min_abs_alignment = 1.0;
    Index simple_count = 0;
    double max_cluster_angle = 0.0;
    /// Degenerate or truncated clusters only.
    std::vector<EigenCluster> clusters;
    bool flagged = false;

    bool within(double eigval_tol, double alignment_tol, double angle_tol) const {
        return max_eigval_rel_err <= eigval_tol && min_abs_alignment >= 1.0 - alignment_tol &&
               max_cluster_angle <= angle_tol;
    }
};

/// Runs both paths on `ens` and compares them. Consecutive eigenvalues closer
/// than cluster_tol * lambda_1 are treated as one cluster.
CrossValidationReport cross_validate_paths(const FlowEnsemble& ens, Index J, double cluster_tol = 1e-9);

/// Same comparison for two precomputed eigensystems. `next_eigenvalue` is
/// lambda_{J+1} of the reference, if it exists, to detect truncated clusters.
CrossValidationReport compare_eigensystems(const EigenSystem& reference, const EigenSystem& candidate,
                                           double cluster_tol, std::optional<double> next_eigenvalue);

/// values(j, r) = w * x_j^T Phi_r.
ScoreMatrix compute_scores(const FlowEnsemble& ens, const EigenSystem& eig);

/// Flips each column so its largest-magnitude entry is positive.
void normalize_signs(MatrixXd& vectors);

} // namespace flowkl
