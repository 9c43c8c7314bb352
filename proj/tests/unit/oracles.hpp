#pragma once

// Reference computations for the tests. Everything here is written directly
// from the definitions with plain loops or closed forms, and does not call
// the library routine it is used to check.

#include "flowkl/model.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace oracle {

using flowkl::Index;
using flowkl::MatrixXd;
using flowkl::VectorXd;

inline MatrixXd gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    MatrixXd a(rows, cols);
    for (Index c = 0; c < cols; ++c) {
        for (Index r = 0; r < rows; ++r) {
            a(r, c) = normal(gen);
        }
    }
    return a;
}

/// Columns orthonormal in the Euclidean sense.
inline MatrixXd orthonormal_columns(Index rows, Index cols, std::uint64_t seed) {
    Eigen::HouseholderQR<MatrixXd> qr(gaussian_matrix(rows, cols, seed));
    return qr.householderQ() * MatrixXd::Identity(rows, cols);
}

/// X = U diag(s) V^T with the singular values chosen so that the empirical
/// operator has exactly the eigenvalues `lambda` (lambda = w s^2 / N).
/// Returns the stacked eigenflows (w^{-1/2} U) through `flows` if given.
inline flowkl::FlowEnsemble planted_ensemble(const flowkl::Grid& grid, flowkl::BasisTruncation trunc, Index N,
                                             const VectorXd& lambda, std::uint64_t seed, MatrixXd* flows = nullptr) {
    const Index mn = grid.n() * trunc.m();
    const Index r = lambda.size();
    const MatrixXd u = orthonormal_columns(mn, r, seed);
    const MatrixXd v = orthonormal_columns(N, r, seed + 1);
    const double w = grid.weight();
    VectorXd s(r);
    for (Index j = 0; j < r; ++j) {
        s(j) = std::sqrt(lambda(j) * static_cast<double>(N) / w);
    }
    if (flows != nullptr) {
        *flows = u / std::sqrt(w);
    }
    return flowkl::FlowEnsemble(grid, trunc, u * s.asDiagonal() * v.transpose());
}

/// Kernel assembly entry by entry: (1/N) sum_j x_j(a) x_j(b).
inline MatrixXd kernel_by_loops(const MatrixXd& x) {
    const Index d = x.rows();
    const Index N = x.cols();
    MatrixXd k = MatrixXd::Zero(d, d);
    for (Index a = 0; a < d; ++a) {
        for (Index b = 0; b < d; ++b) {
            double acc = 0.0;
            for (Index j = 0; j < N; ++j) {
                acc += x(a, j) * x(b, j);
            }
            k(a, b) = acc / static_cast<double>(N);
        }
    }
    return k;
}

inline double brownian_lambda(Index j, double L = 1.0) {
    const double f = (static_cast<double>(j) - 0.5) * std::numbers::pi;
    return L * L / (f * f);
}

inline double brownian_phi(Index j, double t, double L = 1.0) {
    return std::sqrt(2.0 / L) * std::sin((static_cast<double>(j) - 0.5) * std::numbers::pi * t / L);
}

/// Largest absolute Euclidean inner product normalised by quadrature.
inline double quad_inner(const VectorXd& a, const VectorXd& b, double w) { return w * a.dot(b); }

/// Symmetric eigenvalues of a dense matrix, descending.
inline VectorXd descending_eigenvalues(const MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(a, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().reverse();
}

} // namespace oracle
