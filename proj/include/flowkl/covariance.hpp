#pragma once

#include "flowkl/model.hpp"

#include <cstdint>
#include <optional>
#include <span>

namespace flowkl {

/// Scalar autocovariance C(t_k, t_l) = E <chi(t_k), chi(t_l)>_H on the grid.
struct ScalarKernel {
    Grid grid;
    MatrixXd values;
};

/// Subtracts the empirical mean flow from every sample.
FlowEnsemble centered(const FlowEnsemble& ens);

/// block(k, l) = (1/N) sum_j x_j(k) x_j(l)^T, i.e. the blocked (1/N) X X^T.
/// The lower triangle is computed once and mirrored, so the result is
/// exactly symmetric. With `center` the empirical mean flow is removed first.
DiscreteKernel empirical_operator_kernel(const FlowEnsemble& ens, bool center = false);

/// min(t_k, t_l) diag(mu): the population kernel of the separable Brownian flow.
DiscreteKernel separable_brownian_kernel(const Grid& grid, std::span<const double> mu);

/// sum_{j <= j_max} lambda_j phi_j(t_k) phi_j(t_l) diag(mu): the exact
/// population kernel of generate_separable_brownian at the same j_max.
DiscreteKernel truncated_brownian_kernel(const Grid& grid, std::span<const double> mu, Index j_max);

struct NndReport {
    /// Minimum over probes of sum_{a,b} <K(v_a, v_b) h_a, h_b> with sum ||h_a||^2 = 1.
    double min_quadratic_form = 0.0;
    /// Smallest eigenvalue of the full assembly, when requested.
    std::optional<double> min_eigenvalue;
    /// Frobenius norm of the assembly.
    double kernel_norm = 0.0;
    Index probes = 0;
};

/// Non-negative-definiteness check by random probing of the quadratic form
/// over node subsets, plus (optionally) a dense eigensolve.
NndReport nnd_check(const DiscreteKernel& kernel, Index probes, std::uint64_t seed, bool eigensolve = true);

struct TraceReport {
    double lhs = 0.0; ///< sum_j lambda_j
    double rhs = 0.0; ///< w sum_k tr K(t_k, t_k)
    double rel_err = 0.0;
    bool truncated = false;
    /// rhs - lhs when the eigensystem does not cover the full rank.
    double truncation_deficit = 0.0;
};

TraceReport trace_identity(const DiscreteKernel& kernel, const EigenSystem& eig);

ScalarKernel scalar_autocovariance(const FlowEnsemble& ens, bool center = false);

/// Scalar kernel obtained by tracing each operator block.
ScalarKernel trace_kernel(const DiscreteKernel& kernel);

/// Sum of singular values.
double trace_norm(const Eigen::Ref<const MatrixXd>& a);

} // namespace flowkl
