#include "flowkl/diagnostics.hpp"

#include "flowkl/error.hpp"
#include "flowkl/parallel.hpp"
#include "flowkl/spectral.hpp"
#include "symmetric.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace flowkl {

namespace {

void require_J(Index J, Index bound, const char* what) {
    if (J < 0 || J > bound) {
        throw ArgumentError(std::string(what) + ": J = " + std::to_string(J) + " outside [0, " +
                            std::to_string(bound) + "]");
    }
}

void require_sweep(std::span<const Index> J_values, Index bound, const char* what) {
    for (std::size_t a = 0; a < J_values.size(); ++a) {
        require_J(J_values[a], bound, what);
        if (a > 0 && J_values[a] <= J_values[a - 1]) {
            throw ArgumentError(std::string(what) + ": J values must be strictly ascending");
        }
    }
}

double min_eigenvalue(const MatrixXd& a) {
    if (a.size() == 1) {
        return a(0, 0);
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(a, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

VectorXd diagonal_traces(const DiscreteKernel& kernel) {
    VectorXd t(kernel.grid().n());
    for (Index k = 0; k < t.size(); ++k) {
        t(k) = kernel.block(k, k).trace();
    }
    return t;
}

/// ||Phi_j(t_k)||^2 for j < J, as an n x J matrix.
MatrixXd pointwise_sq_norms(const EigenSystem& eig, Index J) {
    const Index n = eig.grid().n();
    const Index m = eig.trunc().m();
    MatrixXd out(n, J);
    for (Index j = 0; j < J; ++j) {
        for (Index k = 0; k < n; ++k) {
            out(k, j) = eig.eigenflows().col(j).segment(k * m, m).squaredNorm();
        }
    }
    return out;
}

VectorXd energies(const FlowEnsemble& ens, const MatrixXd& basis) {
    const MatrixXd coeffs = ens.grid().weight() * (basis.transpose() * ens.data());
    return coeffs.rowwise().squaredNorm() / static_cast<double>(std::max<Index>(ens.size(), 1));
}

} // namespace

DiscreteKernel mercer_partial_sum(const EigenSystem& eig, Index J) {
    require_J(J, eig.count(), "mercer_partial_sum");
    const VectorXd root = eig.eigenvalues().head(J).cwiseMax(0.0).cwiseSqrt();
    const MatrixXd b = eig.eigenflows().leftCols(J) * root.asDiagonal();
    return DiscreteKernel(eig.grid(), eig.trunc(), detail::gram_outer(b));
}

MercerReport mercer_convergence_report(const DiscreteKernel& kernel, const EigenSystem& eig,
                                       std::span<const Index> J_values) {
    require_same_discretization(kernel.grid(), kernel.trunc(), eig.grid(), eig.trunc(), "mercer_convergence_report");
    require_sweep(J_values, eig.count(), "mercer_convergence_report");
    const Index n = kernel.grid().n();
    const Index m = kernel.trunc().m();
    const VectorXd diag_trace = diagonal_traces(kernel);

    MercerReport report;
    report.J_values.assign(J_values.begin(), J_values.end());
    report.scale = kernel.scale();

    for (Index J : J_values) {
        const DiscreteKernel partial = mercer_partial_sum(eig, J);
        const MatrixXd residual = kernel.assembly() - partial.assembly();

        // Per-row results, reduced in a fixed order afterwards.
        std::vector<double> row_residual(static_cast<std::size_t>(n));
        std::vector<double> row_excess(static_cast<std::size_t>(n));
        std::vector<double> row_min_eig(static_cast<std::size_t>(n));
        parallel_for(n, [&](std::ptrdiff_t k) {
            double sup_res = 0.0;
            double excess = -std::numeric_limits<double>::infinity();
            for (Index l = k; l < n; ++l) {
                sup_res = std::max(sup_res, trace_norm(residual.block(k * m, l * m, m, m)));
                const double bound = std::sqrt(std::max(diag_trace(k), 0.0) * std::max(diag_trace(l), 0.0));
                excess = std::max(excess, trace_norm(partial.block(k, l)) - bound);
            }
            const auto at = static_cast<std::size_t>(k);
            row_residual[at] = sup_res;
            row_excess[at] = excess;
            row_min_eig[at] = min_eigenvalue(residual.block(k * m, k * m, m, m));
        });

        double sup_res = 0.0;
        double excess = -std::numeric_limits<double>::infinity();
        double min_eig = std::numeric_limits<double>::infinity();
        double min_rel = std::numeric_limits<double>::infinity();
        for (Index k = 0; k < n; ++k) {
            const auto at = static_cast<std::size_t>(k);
            sup_res = std::max(sup_res, row_residual[at]);
            excess = std::max(excess, row_excess[at]);
            min_eig = std::min(min_eig, row_min_eig[at]);
            min_rel = std::min(min_rel, diag_trace(k) > 0.0 ? row_min_eig[at] / diag_trace(k) : row_min_eig[at]);
        }
        report.residual_sup_trace.push_back(sup_res);
        report.cs_bound_excess.push_back(excess);
        report.diag_psd_min_eig.push_back(min_eig);
        report.diag_psd_min_rel.push_back(min_rel);
    }
    return report;
}

FlowSample kl_truncate(const FlowSample& sample, const EigenSystem& eig, Index J) {
    require_same_discretization(sample.grid(), sample.trunc(), eig.grid(), eig.trunc(), "kl_truncate");
    require_J(J, eig.count(), "kl_truncate");
    const auto flows = eig.eigenflows().leftCols(J);
    const VectorXd x = stack(sample);
    const VectorXd scores = sample.grid().weight() * (flows.transpose() * x);
    return unstack(flows * scores, sample.grid(), sample.trunc());
}

VectorXd truncation_mse_profile(const DiscreteKernel& kernel, const EigenSystem& eig, Index J) {
    require_same_discretization(kernel.grid(), kernel.trunc(), eig.grid(), eig.trunc(), "truncation_mse_profile");
    require_J(J, eig.count(), "truncation_mse_profile");
    return diagonal_traces(kernel) - pointwise_sq_norms(eig, J) * eig.eigenvalues().head(J);
}

McTruncationError mc_truncation_error(const FlowEnsemble& fresh, const EigenSystem& eig, Index J) {
    require_same_discretization(fresh.grid(), fresh.trunc(), eig.grid(), eig.trunc(), "mc_truncation_error");
    require_J(J, eig.count(), "mc_truncation_error");
    if (fresh.size() < 2) {
        throw ArgumentError("Monte Carlo estimate needs at least two samples");
    }
    const Index n = fresh.grid().n();
    const Index m = fresh.trunc().m();
    const auto flows = eig.eigenflows().leftCols(J);
    const MatrixXd residual =
        fresh.data() - flows * (fresh.grid().weight() * (flows.transpose() * fresh.data()));

    // err(k, j) = ||residual of sample j at node k||^2
    MatrixXd err(n, fresh.size());
    for (Index j = 0; j < fresh.size(); ++j) {
        for (Index k = 0; k < n; ++k) {
            err(k, j) = residual.col(j).segment(k * m, m).squaredNorm();
        }
    }
    const auto count = static_cast<double>(fresh.size());
    McTruncationError out;
    out.mean = err.rowwise().mean();
    const VectorXd centered_sq = (err.colwise() - out.mean).rowwise().squaredNorm();
    out.std_error = (centered_sq / (count - 1.0) / count).cwiseSqrt();
    return out;
}

KLReport uniform_mse_profile(const DiscreteKernel& kernel, const EigenSystem& eig, std::span<const Index> J_values,
                             const FlowEnsemble* fresh, double mc_sigmas) {
    require_sweep(J_values, eig.count(), "uniform_mse_profile");
    KLReport report;
    report.J_values.assign(J_values.begin(), J_values.end());
    report.scale = kernel.scale();
    report.mc_sigmas = mc_sigmas;
    for (Index J : J_values) {
        const VectorXd profile = truncation_mse_profile(kernel, eig, J);
        Index node = 0;
        report.mse_profile_sup.push_back(profile.maxCoeff(&node));
        report.sup_node.push_back(node);
        if (fresh != nullptr) {
            const McTruncationError mc = mc_truncation_error(*fresh, eig, J);
            report.mc_mse_sup.push_back(mc.mean.maxCoeff());
            report.mc_at_sup_node.push_back(mc.mean(node));
            report.mc_std_error_at_sup_node.push_back(mc.std_error(node));
            // The floor absorbs rounding once the truncation error itself is zero.
            const double band = mc_sigmas * mc.std_error(node) + 1e-12 * report.scale;
            if (std::abs(mc.mean(node) - profile(node)) > band) {
                report.mc_agrees = false;
            }
        }
    }
    return report;
}

ScalarEigenSystem scalar_eigendecomposition(const ScalarKernel& kernel) {
    const Index n = kernel.grid.n();
    if (kernel.values.rows() != n || kernel.values.cols() != n) {
        throw DimensionError("scalar kernel shape does not match its grid");
    }
    const double w = kernel.grid.weight();
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(w * kernel.values);
    if (solver.info() != Eigen::Success) {
        throw Error("symmetric eigensolver did not converge");
    }
    VectorXd values = solver.eigenvalues().reverse().cwiseMax(0.0);
    MatrixXd functions = solver.eigenvectors().rowwise().reverse() / std::sqrt(w);
    normalize_signs(functions);
    return ScalarEigenSystem{kernel.grid, std::move(values), std::move(functions)};
}

MatrixXd scalar_product_basis(const FlowEnsemble& ens, Index J) {
    const Index n = ens.grid().n();
    const Index m = ens.trunc().m();
    require_J(J, n * m, "scalar_product_basis");
    const double w = ens.grid().weight();
    const ScalarEigenSystem temporal = scalar_eigendecomposition(scalar_autocovariance(ens));
    const MatrixXd& beta = temporal.functions;

    // Second moment of the H_m-valued coefficient a_r = <chi, beta_r>_{L^2(T)}.
    std::vector<MatrixXd> moments(static_cast<std::size_t>(n), MatrixXd::Zero(m, m));
    for (Index j = 0; j < ens.size(); ++j) {
        const Eigen::Map<const MatrixXd> y(ens.data().col(j).data(), m, n);
        const MatrixXd a = w * (y * beta); // column r is a_r
        for (Index r = 0; r < n; ++r) {
            moments[static_cast<std::size_t>(r)] += a.col(r) * a.col(r).transpose();
        }
    }

    struct Candidate {
        double energy;
        Index r;
        VectorXd direction;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(static_cast<std::size_t>(n * m));
    const double inv_count = 1.0 / static_cast<double>(std::max<Index>(ens.size(), 1));
    for (Index r = 0; r < n; ++r) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> solver(moments[static_cast<std::size_t>(r)] * inv_count);
        MatrixXd dirs = solver.eigenvectors();
        normalize_signs(dirs);
        for (Index i = m - 1; i >= 0; --i) {
            candidates.push_back(Candidate{solver.eigenvalues()(i), r, dirs.col(i)});
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.energy > b.energy; });

    MatrixXd basis(n * m, J);
    for (Index c = 0; c < J; ++c) {
        const Candidate& cand = candidates[static_cast<std::size_t>(c)];
        for (Index k = 0; k < n; ++k) {
            basis.col(c).segment(k * m, m) = beta(k, cand.r) * cand.direction;
        }
    }
    return basis;
}

MatrixXd fourier_tensor_basis(const Grid& grid, BasisTruncation trunc) {
    const Index n = grid.n();
    const Index m = trunc.m();
    const double L = grid.domain_length();
    MatrixXd basis = MatrixXd::Zero(n * m, n * m);
    for (Index r = 0; r < n; ++r) {
        const double amp = r == 0 ? std::sqrt(1.0 / L) : std::sqrt(2.0 / L);
        for (Index k = 0; k < n; ++k) {
            const double value = amp * std::cos(static_cast<double>(r) * std::numbers::pi * grid.node(k) / L);
            for (Index i = 0; i < m; ++i) {
                basis(k * m + i, r * m + i) = value;
            }
        }
    }
    return basis;
}

MatrixXd select_by_energy(const FlowEnsemble& ens, const MatrixXd& basis, Index J) {
    require_J(J, basis.cols(), "select_by_energy");
    const VectorXd e = energies(ens, basis);
    std::vector<Index> order(static_cast<std::size_t>(basis.cols()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return e(a) > e(b); });
    MatrixXd out(basis.rows(), J);
    for (Index c = 0; c < J; ++c) {
        out.col(c) = basis.col(order[static_cast<std::size_t>(c)]);
    }
    return out;
}

double global_truncation_mse(const FlowEnsemble& ens, const MatrixXd& basis) {
    if (basis.rows() != ens.dim()) {
        throw DimensionError("basis rows do not match the ensemble dimension");
    }
    if (ens.size() == 0) {
        return 0.0;
    }
    const double w = ens.grid().weight();
    const MatrixXd residual = ens.data() - basis * (w * (basis.transpose() * ens.data()));
    return w * residual.squaredNorm() / static_cast<double>(ens.size());
}

ScalarComparisonReport scalar_comparison(const FlowEnsemble& ens, Index J) {
    require_J(J, std::min(ens.dim(), ens.size()), "scalar_comparison");
    ScalarComparisonReport report;
    report.J = J;
    report.total_energy = ens.grid().weight() * ens.data().squaredNorm() / static_cast<double>(ens.size());
    report.operator_kl_global_mse = global_truncation_mse(ens, svd_fast_path(ens, J).eigenflows());
    report.scalar_basis_global_mse = global_truncation_mse(ens, scalar_product_basis(ens, J));
    report.fourier_basis_global_mse =
        global_truncation_mse(ens, select_by_energy(ens, fourier_tensor_basis(ens.grid(), ens.trunc()), J));
    return report;
}

} // namespace flowkl
