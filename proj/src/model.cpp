#include "flowkl/model.hpp"

#include "flowkl/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace flowkl {

namespace {

bool all_finite(const MatrixXd& a) { return a.allFinite(); }

std::string shape(Index r, Index c) { return std::to_string(r) + "x" + std::to_string(c); }

} // namespace

Grid::Grid(Index n, double domain_length) : n_(n), domain_length_(domain_length), weight_(0.0) {
    if (n < 1) {
        throw ArgumentError("grid needs at least one node, got n = " + std::to_string(n));
    }
    if (!(domain_length > 0.0) || !std::isfinite(domain_length)) {
        throw ArgumentError("domain length must be positive and finite");
    }
    weight_ = domain_length / static_cast<double>(n);
}

VectorXd Grid::nodes() const {
    VectorXd t(n_);
    for (Index k = 0; k < n_; ++k) {
        t(k) = node(k);
    }
    return t;
}

BasisTruncation::BasisTruncation(Index m) : m_(m) {
    if (m < 1) {
        throw ArgumentError("basis truncation needs m >= 1, got " + std::to_string(m));
    }
}

FlowSample::FlowSample(Grid grid, BasisTruncation trunc, MatrixXd coeffs)
    : grid_(grid), trunc_(trunc), coeffs_(std::move(coeffs)) {
    if (coeffs_.rows() != grid_.n() || coeffs_.cols() != trunc_.m()) {
        throw DimensionError("flow sample coefficients are " + shape(coeffs_.rows(), coeffs_.cols()) +
                             ", expected " + shape(grid_.n(), trunc_.m()));
    }
    if (!all_finite(coeffs_)) {
        throw ArgumentError("flow sample has non-finite coefficients");
    }
}

FlowEnsemble::FlowEnsemble(Grid grid, BasisTruncation trunc, MatrixXd data)
    : grid_(grid), trunc_(trunc), data_(std::move(data)) {
    if (data_.rows() != grid_.n() * trunc_.m()) {
        throw DimensionError("ensemble has " + std::to_string(data_.rows()) + " rows, expected m*n = " +
                             std::to_string(grid_.n() * trunc_.m()));
    }
    if (!all_finite(data_)) {
        throw ArgumentError("ensemble has non-finite entries");
    }
}

FlowSample FlowEnsemble::sample(Index j) const {
    if (j < 0 || j >= size()) {
        throw ArgumentError("sample index " + std::to_string(j) + " out of range");
    }
    return unstack(data_.col(j), grid_, trunc_);
}

DiscreteKernel::DiscreteKernel(Grid grid, BasisTruncation trunc, MatrixXd assembly)
    : grid_(grid), trunc_(trunc), assembly_(std::move(assembly)) {
    const Index d = grid_.n() * trunc_.m();
    if (assembly_.rows() != d || assembly_.cols() != d) {
        throw DimensionError("kernel assembly is " + shape(assembly_.rows(), assembly_.cols()) + ", expected " +
                             shape(d, d));
    }
    if (!all_finite(assembly_)) {
        throw ArgumentError("kernel has non-finite entries");
    }
    const double tol = 1e-12 * std::max(1.0, assembly_.cwiseAbs().maxCoeff());
    if ((assembly_ - assembly_.transpose()).cwiseAbs().maxCoeff() > tol) {
        throw ArgumentError("kernel is not symmetric: block(k,l) must equal block(l,k)^T");
    }
}

double DiscreteKernel::scale() const {
    double s = 0.0;
    for (Index k = 0; k < grid_.n(); ++k) {
        s = std::max(s, block(k, k).trace());
    }
    return s;
}

EigenSystem::EigenSystem(Grid grid, BasisTruncation trunc, VectorXd eigenvalues, MatrixXd eigenflows)
    : grid_(grid), trunc_(trunc), eigenvalues_(std::move(eigenvalues)), eigenflows_(std::move(eigenflows)) {
    if (eigenflows_.rows() != grid_.n() * trunc_.m() || eigenflows_.cols() != eigenvalues_.size()) {
        throw DimensionError("eigenflow matrix is " + shape(eigenflows_.rows(), eigenflows_.cols()) +
                             ", expected " + shape(grid_.n() * trunc_.m(), eigenvalues_.size()));
    }
    for (Index j = 1; j < eigenvalues_.size(); ++j) {
        if (eigenvalues_(j) > eigenvalues_(j - 1)) {
            throw ArgumentError("eigenvalues must be sorted nonincreasing");
        }
    }
}

FlowSample EigenSystem::eigenflow(Index j) const {
    if (j < 0 || j >= count()) {
        throw ArgumentError("eigenflow index " + std::to_string(j) + " out of range");
    }
    return unstack(eigenflows_.col(j), grid_, trunc_);
}

double EigenSystem::orthonormality_defect() const {
    if (count() == 0) {
        return 0.0;
    }
    const MatrixXd gram = grid_.weight() * (eigenflows_.transpose() * eigenflows_);
    return (gram - MatrixXd::Identity(count(), count())).cwiseAbs().maxCoeff();
}

VectorXd stack(const FlowSample& sample) {
    const MatrixXd& c = sample.coeffs();
    VectorXd v(c.size());
    const Index m = c.cols();
    for (Index k = 0; k < c.rows(); ++k) {
        for (Index i = 0; i < m; ++i) {
            v(k * m + i) = c(k, i);
        }
    }
    return v;
}

FlowSample unstack(const Eigen::Ref<const VectorXd>& v, const Grid& grid, BasisTruncation trunc) {
    const Index n = grid.n();
    const Index m = trunc.m();
    if (v.size() != n * m) {
        throw DimensionError("cannot unstack a vector of length " + std::to_string(v.size()) + " onto n*m = " +
                             std::to_string(n * m));
    }
    MatrixXd c(n, m);
    for (Index k = 0; k < n; ++k) {
        for (Index i = 0; i < m; ++i) {
            c(k, i) = v(k * m + i);
        }
    }
    return FlowSample(grid, trunc, std::move(c));
}

double l2_inner(const FlowSample& f, const FlowSample& g) {
    require_same_discretization(f.grid(), f.trunc(), g.grid(), g.trunc(), "l2_inner");
    return f.grid().weight() * f.coeffs().cwiseProduct(g.coeffs()).sum();
}

void require_same_discretization(const Grid& ga, BasisTruncation ta, const Grid& gb, BasisTruncation tb,
                                 const char* context) {
    if (!(ga == gb)) {
        throw DimensionError(std::string(context) + ": grid mismatch (n = " + std::to_string(ga.n()) + " vs " +
                             std::to_string(gb.n()) + ")");
    }
    if (!(ta == tb)) {
        throw DimensionError(std::string(context) + ": truncation mismatch (m = " + std::to_string(ta.m()) +
                             " vs " + std::to_string(tb.m()) + ")");
    }
}

} // namespace flowkl
