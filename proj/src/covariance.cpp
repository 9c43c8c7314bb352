#include "flowkl/covariance.hpp"

#include "flowkl/error.hpp"
#include "flowkl/generators.hpp"
#include "flowkl/random.hpp"
#include "symmetric.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace flowkl {

namespace {

void require_nonempty(const FlowEnsemble& ens, const char* what) {
    if (ens.size() < 1) {
        throw ArgumentError(std::string(what) + " needs at least one sample");
    }
}

void validate_mu(std::span<const double> mu) {
    if (mu.empty()) {
        throw ArgumentError("mu must not be empty");
    }
    for (double v : mu) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ArgumentError("mu must be nonnegative");
        }
    }
}

} // namespace

FlowEnsemble centered(const FlowEnsemble& ens) {
    if (ens.size() == 0) {
        return ens;
    }
    const VectorXd mean = ens.data().rowwise().mean();
    return FlowEnsemble(ens.grid(), ens.trunc(), ens.data().colwise() - mean);
}

DiscreteKernel empirical_operator_kernel(const FlowEnsemble& ens, bool center) {
    require_nonempty(ens, "empirical_operator_kernel");
    if (center) {
        return empirical_operator_kernel(centered(ens), false);
    }
    const MatrixXd& x = ens.data();
    return DiscreteKernel(ens.grid(), ens.trunc(), detail::gram_outer(x, 1.0 / static_cast<double>(ens.size())));
}

DiscreteKernel separable_brownian_kernel(const Grid& grid, std::span<const double> mu) {
    validate_mu(mu);
    const Index n = grid.n();
    const auto m = static_cast<Index>(mu.size());
    MatrixXd k = MatrixXd::Zero(n * m, n * m);
    for (Index a = 0; a < n; ++a) {
        for (Index b = 0; b < n; ++b) {
            const double c = std::min(grid.node(a), grid.node(b));
            for (Index i = 0; i < m; ++i) {
                k(a * m + i, b * m + i) = c * mu[static_cast<std::size_t>(i)];
            }
        }
    }
    return DiscreteKernel(grid, BasisTruncation(m), std::move(k));
}

DiscreteKernel truncated_brownian_kernel(const Grid& grid, std::span<const double> mu, Index j_max) {
    validate_mu(mu);
    if (j_max < 1) {
        throw ArgumentError("j_max must be at least 1");
    }
    const Index n = grid.n();
    const auto m = static_cast<Index>(mu.size());
    const double L = grid.domain_length();
    MatrixXd basis(n, j_max);
    for (Index j = 0; j < j_max; ++j) {
        const double s = std::sqrt(brownian_eigenvalue(j + 1, L));
        for (Index k = 0; k < n; ++k) {
            basis(k, j) = s * brownian_eigenfunction(j + 1, grid.node(k), L);
        }
    }
    const MatrixXd temporal = detail::gram_outer(basis);

    MatrixXd k = MatrixXd::Zero(n * m, n * m);
    for (Index a = 0; a < n; ++a) {
        for (Index b = 0; b < n; ++b) {
            for (Index i = 0; i < m; ++i) {
                k(a * m + i, b * m + i) = temporal(a, b) * mu[static_cast<std::size_t>(i)];
            }
        }
    }
    return DiscreteKernel(grid, BasisTruncation(m), std::move(k));
}

NndReport nnd_check(const DiscreteKernel& kernel, Index probes, std::uint64_t seed, bool eigensolve) {
    if (probes < 1) {
        throw ArgumentError("nnd_check needs at least one probe");
    }
    const Index n = kernel.grid().n();
    const Index m = kernel.trunc().m();
    const MatrixXd& a = kernel.assembly();

    NndReport report;
    report.probes = probes;
    report.kernel_norm = a.norm();
    report.min_quadratic_form = std::numeric_limits<double>::infinity();

    RandomStream rng(seed, 0);
    const Index max_points = std::min<Index>(n, 8);
    for (Index p = 0; p < probes; ++p) {
        // Node list v_1..v_s (repeats allowed) with vectors h_a in H_m.
        const Index points = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(max_points)));
        std::vector<Index> nodes(static_cast<std::size_t>(points));
        MatrixXd h(m, points);
        for (Index s = 0; s < points; ++s) {
            nodes[static_cast<std::size_t>(s)] = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
            for (Index i = 0; i < m; ++i) {
                h(i, s) = rng.normal();
            }
        }
        h /= h.norm();
        double form = 0.0;
        for (Index s = 0; s < points; ++s) {
            for (Index t = 0; t < points; ++t) {
                form += h.col(t).dot(kernel.block(nodes[static_cast<std::size_t>(t)],
                                                  nodes[static_cast<std::size_t>(s)]) *
                                     h.col(s));
            }
        }
        report.min_quadratic_form = std::min(report.min_quadratic_form, form);
    }

    if (eigensolve) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> solver(a, Eigen::EigenvaluesOnly);
        report.min_eigenvalue = solver.eigenvalues()(0);
    }
    return report;
}

TraceReport trace_identity(const DiscreteKernel& kernel, const EigenSystem& eig) {
    require_same_discretization(kernel.grid(), kernel.trunc(), eig.grid(), eig.trunc(), "trace_identity");
    TraceReport report;
    report.lhs = eig.eigenvalues().sum();
    double diag = 0.0;
    for (Index k = 0; k < kernel.grid().n(); ++k) {
        diag += kernel.block(k, k).trace();
    }
    report.rhs = kernel.grid().weight() * diag;
    const double diff = std::abs(report.lhs - report.rhs);
    report.rel_err = report.rhs != 0.0 ? diff / std::abs(report.rhs) : diff;
    report.truncated = eig.count() < kernel.assembly().rows();
    if (report.truncated) {
        report.truncation_deficit = report.rhs - report.lhs;
    }
    return report;
}

ScalarKernel scalar_autocovariance(const FlowEnsemble& ens, bool center) {
    require_nonempty(ens, "scalar_autocovariance");
    if (center) {
        return scalar_autocovariance(centered(ens), false);
    }
    const Index n = ens.grid().n();
    const Index m = ens.trunc().m();
    // Column j viewed as an m x n matrix has node blocks as columns; stacking
    // all of them vertically gives Z with C = Z^T Z / N.
    MatrixXd z(m * ens.size(), n);
    for (Index j = 0; j < ens.size(); ++j) {
        z.middleRows(j * m, m) = Eigen::Map<const MatrixXd>(ens.data().col(j).data(), m, n);
    }
    return ScalarKernel{ens.grid(), detail::gram_outer(z.transpose(), 1.0 / static_cast<double>(ens.size()))};
}

ScalarKernel trace_kernel(const DiscreteKernel& kernel) {
    const Index n = kernel.grid().n();
    MatrixXd c(n, n);
    for (Index k = 0; k < n; ++k) {
        for (Index l = 0; l < n; ++l) {
            c(k, l) = kernel.block(k, l).trace();
        }
    }
    return ScalarKernel{kernel.grid(), std::move(c)};
}

double trace_norm(const Eigen::Ref<const MatrixXd>& a) {
    if (a.size() == 1) {
        return std::abs(a(0, 0));
    }
    Eigen::JacobiSVD<MatrixXd> svd(a);
    return svd.singularValues().sum();
}

} // namespace flowkl
