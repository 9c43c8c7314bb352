#pragma once

// Executable checks of the Mercer and Karhunen-Loeve identities on the grid.
//
// "sup over T" is always the max over grid nodes.

#include "flowkl/covariance.hpp"
#include "flowkl/model.hpp"

#include <span>
#include <vector>

namespace flowkl {

/// block(k, l) = sum_{j < J} lambda_j Phi_j(t_k) Phi_j(t_l)^T.
DiscreteKernel mercer_partial_sum(const EigenSystem& eig, Index J);

struct MercerReport {
    std::vector<Index> J_values;
    /// max_{k,l} ||K(t_k,t_l) - partial_J(t_k,t_l)||_1 (trace norm).
    std::vector<double> residual_sup_trace;
    /// min_k lambda_min(K(t_k,t_k) - partial_J(t_k,t_k)).
    std::vector<double> diag_psd_min_eig;
    /// min_k lambda_min(residual(t_k,t_k)) / tr K(t_k,t_k), over nodes with nonzero trace.
    std::vector<double> diag_psd_min_rel;
    /// max_{k,l} ||partial_J(t_k,t_l)||_1 - sqrt(tr K(t_k,t_k) tr K(t_l,t_l)); <= 0 when the bound holds.
    std::vector<double> cs_bound_excess;
    double scale = 0.0;
};

/// J_values must be ascending and within [0, eig.count()].
MercerReport mercer_convergence_report(const DiscreteKernel& kernel, const EigenSystem& eig,
                                       std::span<const Index> J_values);

/// sum_{j < J} <sample, Phi_j> Phi_j on the grid.
FlowSample kl_truncate(const FlowSample& sample, const EigenSystem& eig, Index J);

/// tr K(t_k,t_k) - sum_{j < J} lambda_j ||Phi_j(t_k)||^2 for every node.
VectorXd truncation_mse_profile(const DiscreteKernel& kernel, const EigenSystem& eig, Index J);

/// Pointwise Monte Carlo estimate of E ||chi_J(t_k) - chi(t_k)||^2.
struct McTruncationError {
    VectorXd mean;
    VectorXd std_error;
};

McTruncationError mc_truncation_error(const FlowEnsemble& fresh, const EigenSystem& eig, Index J);

struct KLReport {
    std::vector<Index> J_values;
    std::vector<double> mse_profile_sup;
    /// Node attaining each sup.
    std::vector<Index> sup_node;
    /// Present when a fresh ensemble was supplied.
    std::vector<double> mc_mse_sup;
    /// Monte Carlo mean and standard error at sup_node, compared against the
    /// closed-form sup there.
    std::vector<double> mc_at_sup_node;
    std::vector<double> mc_std_error_at_sup_node;
    bool mc_agrees = true;
    double mc_sigmas = 4.0;
    double scale = 0.0;

    bool has_mc() const noexcept { return !mc_mse_sup.empty(); }
};

/// Closed-form truncation error profile for each J. With `fresh` (samples of
/// the process whose kernel is `kernel`), also estimates it by Monte Carlo
/// and requires agreement within `mc_sigmas` standard errors (plus 1e-12 * scale) at the sup node.
KLReport uniform_mse_profile(const DiscreteKernel& kernel, const EigenSystem& eig, std::span<const Index> J_values,
                             const FlowEnsemble* fresh = nullptr, double mc_sigmas = 4.0);

/// Eigenpairs of the scalar autocovariance; functions are quadrature-orthonormal columns.
struct ScalarEigenSystem {
    Grid grid;
    VectorXd eigenvalues;
    MatrixXd functions;
};

ScalarEigenSystem scalar_eigendecomposition(const ScalarKernel& kernel);

/// Rank-J basis built from the scalar autocovariance: products beta_r(t) d
/// of its temporal eigenfunctions with eigen-directions d of the H-valued
/// coefficient <chi, beta_r>, ranked by explained energy. Returned stacked,
/// one flow per column.
MatrixXd scalar_product_basis(const FlowEnsemble& ens, Index J);

/// All n*m products of the cosine basis on T with e_i; exactly orthonormal
/// under midpoint quadrature.
MatrixXd fourier_tensor_basis(const Grid& grid, BasisTruncation trunc);

/// The J columns of an orthonormal basis that capture the most empirical energy.
MatrixXd select_by_energy(const FlowEnsemble& ens, const MatrixXd& basis, Index J);

/// (1/N) sum_j ||chi^j - P chi^j||^2 with P the quadrature projection onto
/// span(basis); the basis must be quadrature-orthonormal.
double global_truncation_mse(const FlowEnsemble& ens, const MatrixXd& basis);

struct ScalarComparisonReport {
    Index J = 0;
    double operator_kl_global_mse = 0.0;
    double scalar_basis_global_mse = 0.0;
    double fourier_basis_global_mse = 0.0;
    double total_energy = 0.0;
};

/// Requires J <= min(m n, N).
ScalarComparisonReport scalar_comparison(const FlowEnsemble& ens, Index J);

} // namespace flowkl
