#include "flowkl/covariance.hpp"
#include "flowkl/diagnostics.hpp"
#include "flowkl/error.hpp"
#include "flowkl/generators.hpp"
#include "flowkl/spectral.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace flowkl;

namespace {

/// Stacked product flow beta(t_k) d_i at entry k*m + i.
VectorXd product_flow(const VectorXd& beta, const VectorXd& d) {
    VectorXd out(beta.size() * d.size());
    for (Index k = 0; k < beta.size(); ++k) {
        out.segment(k * d.size(), d.size()) = beta(k) * d;
    }
    return out;
}

/// Ensemble with empirical kernel sum_r lambda_r Phi_r Phi_r^T exactly, for
/// given quadrature-orthonormal stacked flows.
FlowEnsemble planted_from_flows(const Grid& g, BasisTruncation t, const MatrixXd& flows, const VectorXd& lambda,
                                Index N, std::uint64_t seed) {
    const MatrixXd v = oracle::orthonormal_columns(N, lambda.size(), seed);
    const VectorXd s = (lambda * static_cast<double>(N)).cwiseSqrt();
    // w Phi^T Phi = I, so X = Phi diag(sqrt(N lambda)) V^T has w X X^T / N Phi = Phi diag(lambda).
    return FlowEnsemble(g, t, flows * s.asDiagonal() * v.transpose());
}

MatrixXd cosine_basis(const Grid& g, Index count) {
    MatrixXd b(g.n(), count);
    for (Index r = 0; r < count; ++r) {
        for (Index k = 0; k < g.n(); ++k) {
            const double c = r == 0 ? std::sqrt(1.0 / g.domain_length()) : std::sqrt(2.0 / g.domain_length());
            b(k, r) = c * std::cos(std::numbers::pi * static_cast<double>(r) * g.node(k) / g.domain_length());
        }
    }
    return b;
}

double oracle_residual_energy(const MatrixXd& x, const MatrixXd& basis, double w) {
    // (1/N) sum_j w ||x_j - P x_j||^2 with P the projection onto orthonormal basis.
    double total = 0.0;
    for (Index j = 0; j < x.cols(); ++j) {
        VectorXd r = x.col(j);
        for (Index c = 0; c < basis.cols(); ++c) {
            r -= w * basis.col(c).dot(x.col(j)) * basis.col(c);
        }
        total += w * r.squaredNorm();
    }
    return total / static_cast<double>(x.cols());
}

} // namespace

TEST(MercerPartialSum, Examples) {
    const FlowEnsemble e(Grid(5), BasisTruncation(2), oracle::gaussian_matrix(10, 12, 1));
    const DiscreteKernel k = empirical_operator_kernel(e);
    const EigenSystem eig = naive_eigendecomposition(k, 10);
    EXPECT_EQ(mercer_partial_sum(eig, 0).assembly(), MatrixXd::Zero(10, 10));
    double worst = 0.0;
    const DiscreteKernel full = mercer_partial_sum(eig, 10);
    for (Index a = 0; a < 5; ++a) {
        for (Index b = 0; b < 5; ++b) {
            worst = std::max(worst, trace_norm(k.block(a, b) - full.block(a, b)));
        }
    }
    EXPECT_LE(worst, 1e-10 * k.scale());
    EXPECT_THROW(mercer_partial_sum(eig, 11), ArgumentError);

    VectorXd phi = oracle::gaussian_matrix(10, 1, 2).col(0);
    phi /= std::sqrt(0.2 * phi.squaredNorm());
    const DiscreteKernel rank1(Grid(5), BasisTruncation(2), 3.0 * phi * phi.transpose());
    const DiscreteKernel back = mercer_partial_sum(naive_eigendecomposition(rank1, 1), 1);
    EXPECT_LT((back.assembly() - rank1.assembly()).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(MercerReport, MonotoneDominatedAndComplete) {
    const FlowEnsemble e(Grid(6), BasisTruncation(3), oracle::gaussian_matrix(18, 25, 3));
    const DiscreteKernel k = empirical_operator_kernel(e);
    const EigenSystem eig = naive_eigendecomposition(k, 18);
    const std::vector<Index> sweep{0, 1, 2, 4, 8, 12, 18};
    const MercerReport r = mercer_convergence_report(k, eig, sweep);
    ASSERT_EQ(r.residual_sup_trace.size(), sweep.size());
    ASSERT_EQ(r.diag_psd_min_eig.size(), sweep.size());
    for (std::size_t a = 1; a < sweep.size(); ++a) {
        EXPECT_LE(r.residual_sup_trace[a], r.residual_sup_trace[a - 1] + 1e-12 * r.scale);
    }
    EXPECT_LE(r.residual_sup_trace.back(), 1e-10 * r.scale);
    for (std::size_t a = 0; a < sweep.size(); ++a) {
        EXPECT_GE(r.diag_psd_min_rel[a], -1e-10);
        EXPECT_LE(r.cs_bound_excess[a], 1e-10);
    }
    const std::vector<Index> bad{3, 2};
    EXPECT_THROW(mercer_convergence_report(k, eig, bad), ArgumentError);
}

TEST(MercerReport, AnalyticTailOfSeparableKernel) {
    const Grid g(24);
    const std::vector<double> mu{1.0, 0.3};
    const Index jmax = 24;
    const DiscreteKernel k = truncated_brownian_kernel(g, mu, jmax);
    const EigenSystem eig = naive_eigendecomposition(k, 48);

    // Modes (j, i) sorted by lambda_j mu_i; the residual after the top J is the
    // sum over the rest, diagonal in {e_i}.
    std::vector<std::pair<double, std::pair<Index, Index>>> modes;
    for (Index j = 1; j <= jmax; ++j) {
        for (Index i = 0; i < 2; ++i) {
            modes.push_back({oracle::brownian_lambda(j) * mu[static_cast<std::size_t>(i)], {j, i}});
        }
    }
    std::sort(modes.begin(), modes.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    const std::vector<Index> sweep{1, 3, 6, 10, 20, 30};
    const MercerReport r = mercer_convergence_report(k, eig, sweep);
    for (std::size_t s = 0; s < sweep.size(); ++s) {
        double sup = 0.0;
        for (Index a = 0; a < g.n(); ++a) {
            for (Index b = 0; b < g.n(); ++b) {
                double per_i[2] = {0.0, 0.0};
                for (std::size_t q = static_cast<std::size_t>(sweep[s]); q < modes.size(); ++q) {
                    const auto [j, i] = modes[q].second;
                    per_i[i] += modes[q].first * oracle::brownian_phi(j, g.node(a)) * oracle::brownian_phi(j, g.node(b));
                }
                sup = std::max(sup, std::abs(per_i[0]) + std::abs(per_i[1]));
            }
        }
        EXPECT_NEAR(r.residual_sup_trace[s], sup, 1e-8) << "J = " << sweep[s];
    }
}

TEST(KlTruncate, Examples) {
    const Grid g(5);
    const BasisTruncation t(2);
    MatrixXd flows;
    const FlowEnsemble e = oracle::planted_ensemble(g, t, 15, (VectorXd(3) << 3.0, 2.0, 1.0).finished(), 9, &flows);
    const EigenSystem eig = svd_fast_path(e, 3);
    const FlowSample phi1 = eig.eigenflow(0);
    EXPECT_LT((kl_truncate(phi1, eig, 1).coeffs() - phi1.coeffs()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((kl_truncate(phi1, eig, 3).coeffs() - phi1.coeffs()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(kl_truncate(phi1, eig, 0).coeffs(), MatrixXd::Zero(5, 2));
    const FlowSample s = e.sample(4);
    EXPECT_LT((kl_truncate(s, eig, 3).coeffs() - s.coeffs()).cwiseAbs().maxCoeff(), 1e-10);

    const FlowSample noise(g, t, oracle::gaussian_matrix(5, 2, 3));
    const FlowSample once = kl_truncate(noise, eig, 2);
    EXPECT_LT((kl_truncate(once, eig, 2).coeffs() - once.coeffs()).cwiseAbs().maxCoeff(), 1e-13);
    // Residual is orthogonal to the retained span.
    const FlowSample resid(g, t, noise.coeffs() - once.coeffs());
    EXPECT_NEAR(l2_inner(resid, eig.eigenflow(0)), 0.0, 1e-13);
    EXPECT_THROW(kl_truncate(noise, eig, 4), ArgumentError);
}

TEST(MseProfile, FullRankVanishesAndMonotone) {
    const FlowEnsemble e(Grid(7), BasisTruncation(2), oracle::gaussian_matrix(14, 30, 4));
    const DiscreteKernel k = empirical_operator_kernel(e);
    const EigenSystem eig = naive_eigendecomposition(k, 14);
    const std::vector<Index> sweep{0, 1, 2, 5, 9, 14};
    const KLReport r = uniform_mse_profile(k, eig, sweep);
    EXPECT_FALSE(r.has_mc());
    EXPECT_LE(r.mse_profile_sup.back(), 1e-10 * r.scale);
    for (std::size_t a = 1; a < sweep.size(); ++a) {
        EXPECT_LE(r.mse_profile_sup[a], r.mse_profile_sup[a - 1] + 1e-14);
        EXPECT_GE(r.mse_profile_sup[a], -1e-10 * r.scale);
    }
    EXPECT_NEAR(r.mse_profile_sup[0], r.scale, 1e-15);
}

TEST(MseProfile, ParsevalBookkeeping) {
    const FlowEnsemble e(Grid(9), BasisTruncation(2), oracle::gaussian_matrix(18, 11, 5));
    const EigenSystem eig = svd_fast_path(e, 11);
    double weighted = 0.0;
    for (Index j = 0; j < eig.count(); ++j) {
        weighted += eig.eigenvalues()(j) * e.grid().weight() * eig.eigenflows().col(j).squaredNorm();
    }
    EXPECT_NEAR(weighted, eig.eigenvalues().sum(), 1e-12 * eig.eigenvalues().sum());
}

TEST(MseProfile, BrownianClosedForm) {
    // Continuum eigenpairs sampled on the grid with the min(s,t) kernel: the
    // profile is t - sum_{j<=J} lambda_j 2 sin^2((j - 1/2) pi t).
    const Grid g(50);
    const DiscreteKernel k = separable_brownian_kernel(g, std::vector<double>{1.0});
    const Index J = 6;
    VectorXd lambda(J);
    MatrixXd phi(50, J);
    for (Index j = 0; j < J; ++j) {
        lambda(j) = oracle::brownian_lambda(j + 1);
        for (Index a = 0; a < 50; ++a) {
            phi(a, j) = oracle::brownian_phi(j + 1, g.node(a));
        }
    }
    const EigenSystem eig(g, BasisTruncation(1), lambda, phi);
    for (Index jj : {1, 3, 6}) {
        const VectorXd profile = truncation_mse_profile(k, eig, jj);
        double sup = -1.0;
        for (Index a = 0; a < 50; ++a) {
            const double t = g.node(a);
            double v = t;
            for (Index j = 1; j <= jj; ++j) {
                const double s = std::sin((static_cast<double>(j) - 0.5) * std::numbers::pi * t);
                v -= oracle::brownian_lambda(j) * 2.0 * s * s;
            }
            EXPECT_NEAR(profile(a), v, 1e-12);
            sup = std::max(sup, v);
        }
        EXPECT_NEAR(profile.maxCoeff(), sup, 1e-10);
    }

    // The same with the discrete eigensystem of the truncated kernel, whose
    // eigenpairs are the sampled continuum ones.
    const Index jmax = 50;
    const DiscreteKernel kt = truncated_brownian_kernel(g, std::vector<double>{1.0}, jmax);
    const EigenSystem disc = naive_eigendecomposition(kt, 50);
    for (Index jj : {1, 4, 10}) {
        const VectorXd profile = truncation_mse_profile(kt, disc, jj);
        for (Index a = 0; a < 50; ++a) {
            double v = 0.0;
            for (Index j = jj + 1; j <= jmax; ++j) {
                v += oracle::brownian_lambda(j) * std::pow(oracle::brownian_phi(j, g.node(a)), 2);
            }
            EXPECT_NEAR(profile(a), v, 1e-10);
        }
    }
}

TEST(MseProfile, MonteCarloAgreement) {
    const Grid g(20);
    const std::vector<double> mu{1.0, 0.5};
    const Index jmax = 20;
    const DiscreteKernel k = truncated_brownian_kernel(g, mu, jmax);
    const EigenSystem eig = naive_eigendecomposition(k, 40);
    const FlowEnsemble fresh = generate_separable_brownian({mu, jmax, 31}, g, BasisTruncation(2), 10000);
    const std::vector<Index> sweep{1, 2, 4, 8, 16};
    const KLReport r = uniform_mse_profile(k, eig, sweep, &fresh, 4.0);
    ASSERT_TRUE(r.has_mc());
    EXPECT_TRUE(r.mc_agrees);
    for (std::size_t a = 0; a < sweep.size(); ++a) {
        EXPECT_LE(std::abs(r.mc_at_sup_node[a] - r.mse_profile_sup[a]), 4.0 * r.mc_std_error_at_sup_node[a]);
    }
}

TEST(MseProfile, MonteCarloDetectsWrongKernel) {
    const Grid g(20);
    const std::vector<double> mu{1.0};
    const DiscreteKernel wrong = truncated_brownian_kernel(g, std::vector<double>{2.0}, 20);
    const EigenSystem eig = naive_eigendecomposition(wrong, 20);
    const FlowEnsemble fresh = generate_separable_brownian({mu, 20, 5}, g, BasisTruncation(1), 10000);
    const std::vector<Index> sweep{1, 2};
    EXPECT_FALSE(uniform_mse_profile(wrong, eig, sweep, &fresh, 4.0).mc_agrees);
}

TEST(ScalarBasis, CosineBasisIsOrthonormal) {
    const Grid g(10, 2.0);
    const MatrixXd b = fourier_tensor_basis(g, BasisTruncation(3));
    ASSERT_EQ(b.cols(), 30);
    EXPECT_LT((g.weight() * b.transpose() * b - MatrixXd::Identity(30, 30)).cwiseAbs().maxCoeff(), 1e-12);
    // First column is the constant cosine times e_1.
    const MatrixXd c = cosine_basis(g, 2);
    EXPECT_LT((b.col(0) - product_flow(c.col(0), VectorXd::Unit(3, 0))).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ScalarComparison, SeparableKernelTies) {
    const Grid g(8);
    const BasisTruncation t(3);
    const MatrixXd beta = cosine_basis(g, 3);
    const MatrixXd d = oracle::orthonormal_columns(3, 3, 6);
    const double a[] = {1.0, 0.4, 0.1};
    const double bvals[] = {1.0, 0.3, 0.05};
    MatrixXd flows(24, 9);
    VectorXd lambda(9);
    std::vector<std::pair<double, Index>> order;
    Index c = 0;
    for (Index r = 0; r < 3; ++r) {
        for (Index i = 0; i < 3; ++i, ++c) {
            flows.col(c) = product_flow(beta.col(r), d.col(i));
            lambda(c) = a[r] * bvals[i];
            order.push_back({lambda(c), c});
        }
    }
    std::sort(order.begin(), order.end(), std::greater<>());
    MatrixXd sorted_flows(24, 9);
    VectorXd sorted_lambda(9);
    for (Index q = 0; q < 9; ++q) {
        sorted_flows.col(q) = flows.col(order[static_cast<std::size_t>(q)].second);
        sorted_lambda(q) = order[static_cast<std::size_t>(q)].first;
    }
    const FlowEnsemble e = planted_from_flows(g, t, sorted_flows, sorted_lambda, 30, 2);
    for (Index J : {1, 2, 4, 9}) {
        const ScalarComparisonReport r = scalar_comparison(e, J);
        const double oracle_mse = sorted_lambda.tail(9 - J).sum();
        EXPECT_NEAR(r.operator_kl_global_mse, oracle_mse, 1e-10) << J;
        EXPECT_NEAR(r.scalar_basis_global_mse, r.operator_kl_global_mse, 1e-8) << J;
        EXPECT_LE(r.operator_kl_global_mse, r.fourier_basis_global_mse + 1e-10);
    }
}

TEST(ScalarComparison, NonSeparableMarginMatchesOracle) {
    const Grid g(8);
    const BasisTruncation t(2);
    const MatrixXd beta = cosine_basis(g, 4);
    const MatrixXd e1 = VectorXd::Unit(2, 0);
    const MatrixXd e2 = VectorXd::Unit(2, 1);
    // Leading eigenflow mixes time and H: sqrt(0.7) beta_0 e_1 + sqrt(0.3) beta_1 e_2.
    const double p = std::sqrt(0.7);
    const double q = std::sqrt(0.3);
    MatrixXd flows(16, 3);
    flows.col(0) = p * product_flow(beta.col(0), e1) + q * product_flow(beta.col(1), e2);
    flows.col(1) = q * product_flow(beta.col(0), e1) - p * product_flow(beta.col(1), e2);
    flows.col(2) = product_flow(beta.col(2), e1);
    const VectorXd lambda = (VectorXd(3) << 1.0, 0.2, 0.1).finished();
    const FlowEnsemble e = planted_from_flows(g, t, flows, lambda, 25, 3);

    const ScalarComparisonReport r = scalar_comparison(e, 1);
    const double w = g.weight();
    const double op = oracle_residual_energy(e.data(), flows.col(0), w);
    EXPECT_NEAR(r.operator_kl_global_mse, op, 1e-10);

    // Brute force over product flows beta_r d: the scalar kernel is
    // 0.76 beta_0 beta_0^T + 0.44 beta_1 beta_1^T + 0.1 beta_2 beta_2^T, and
    // <chi, beta_0> lies along e_1, so the best single product captures 0.76.
    double best_capture = 0.0;
    for (Index r0 = 0; r0 < 3; ++r0) {
        for (const MatrixXd& dir : {e1, e2}) {
            const VectorXd prod = product_flow(beta.col(r0), dir.col(0));
            const double capture = lambda.sum() - oracle_residual_energy(e.data(), prod, w);
            best_capture = std::max(best_capture, capture);
        }
    }
    const double scalar_oracle = lambda.sum() - best_capture;
    EXPECT_NEAR(best_capture, 0.76, 1e-10);
    EXPECT_NEAR(r.scalar_basis_global_mse, scalar_oracle, 1e-8);
    const double margin = scalar_oracle - op;
    EXPECT_NEAR(margin, 0.24, 1e-10);
    EXPECT_GE(r.scalar_basis_global_mse - r.operator_kl_global_mse, margin - 1e-8);
    EXPECT_LE(r.operator_kl_global_mse, r.fourier_basis_global_mse + 1e-10);
}

TEST(ScalarComparison, FullBasisLeavesNothing) {
    const FlowEnsemble e(Grid(4), BasisTruncation(2), oracle::gaussian_matrix(8, 20, 7));
    const ScalarComparisonReport r = scalar_comparison(e, 8);
    EXPECT_LE(r.operator_kl_global_mse, 1e-10);
    EXPECT_LE(r.scalar_basis_global_mse, 1e-10);
    EXPECT_LE(r.fourier_basis_global_mse, 1e-10);
    EXPECT_THROW(scalar_comparison(e, 9), ArgumentError);
}

TEST(ScalarEigen, FunctionsOrthonormal) {
    const FlowEnsemble e(Grid(12), BasisTruncation(2), oracle::gaussian_matrix(24, 30, 8));
    const ScalarEigenSystem s = scalar_eigendecomposition(scalar_autocovariance(e));
    EXPECT_LT((e.grid().weight() * s.functions.transpose() * s.functions - MatrixXd::Identity(12, 12))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
    for (Index j = 1; j < 12; ++j) {
        EXPECT_LE(s.eigenvalues(j), s.eigenvalues(j - 1));
    }
}
