#include "flowkl/error.hpp"
#include "flowkl/model.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace flowkl;

namespace {

MatrixXd rows(std::initializer_list<std::initializer_list<double>> init) {
    MatrixXd a(static_cast<Index>(init.size()), static_cast<Index>(init.begin()->size()));
    Index r = 0;
    for (const auto& row : init) {
        Index c = 0;
        for (double v : row) {
            a(r, c++) = v;
        }
        ++r;
    }
    return a;
}

} // namespace

TEST(Grid, MidpointNodesAndWeight) {
    const Grid g(4, 2.0);
    EXPECT_DOUBLE_EQ(g.weight(), 0.5);
    EXPECT_DOUBLE_EQ(g.node(0), 0.25);
    EXPECT_DOUBLE_EQ(g.node(3), 1.75);
    EXPECT_DOUBLE_EQ(g.weight() * static_cast<double>(g.n()), g.domain_length());
    const VectorXd t = g.nodes();
    for (Index k = 1; k < t.size(); ++k) {
        EXPECT_LT(t(k - 1), t(k));
    }
}

TEST(Grid, RejectsBadParameters) {
    EXPECT_THROW(Grid(0), ArgumentError);
    EXPECT_THROW(Grid(3, 0.0), ArgumentError);
    EXPECT_THROW(Grid(3, -1.0), ArgumentError);
    EXPECT_THROW(BasisTruncation(0), ArgumentError);
}

TEST(FlowSample, RejectsWrongShapeAndNonFinite) {
    EXPECT_THROW(FlowSample(Grid(2), BasisTruncation(2), MatrixXd::Zero(2, 3)), DimensionError);
    MatrixXd c = MatrixXd::Zero(2, 1);
    c(1, 0) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(FlowSample(Grid(2), BasisTruncation(1), c), ArgumentError);
}

TEST(Stack, Examples) {
    EXPECT_EQ(stack(FlowSample(Grid(1), BasisTruncation(2), rows({{3, 4}}))), (VectorXd(2) << 3, 4).finished());
    EXPECT_EQ(stack(FlowSample(Grid(2), BasisTruncation(1), rows({{5}, {6}}))), (VectorXd(2) << 5, 6).finished());
    EXPECT_EQ(stack(FlowSample(Grid(2), BasisTruncation(2), rows({{1, 2}, {3, 4}}))),
              (VectorXd(4) << 1, 2, 3, 4).finished());
}

TEST(Unstack, Examples) {
    const FlowSample s = unstack((VectorXd(4) << 1, 2, 3, 4).finished(), Grid(2), BasisTruncation(2));
    EXPECT_EQ(s.coeffs(), rows({{1, 2}, {3, 4}}));
    EXPECT_EQ(unstack((VectorXd(1) << 7).finished(), Grid(1), BasisTruncation(1)).coeffs(), rows({{7}}));
    EXPECT_THROW(unstack(VectorXd::Zero(5), Grid(2), BasisTruncation(2)), DimensionError);
}

TEST(Stack, RoundTripsForManyShapes) {
    for (Index n : {1, 2, 5, 9}) {
        for (Index m : {1, 3, 4}) {
            const VectorXd v = oracle::gaussian_matrix(n * m, 1, static_cast<std::uint64_t>(n * 10 + m)).col(0);
            EXPECT_EQ(stack(unstack(v, Grid(n), BasisTruncation(m))), v);
            const FlowSample s(Grid(n), BasisTruncation(m), oracle::gaussian_matrix(n, m, 99));
            EXPECT_EQ(unstack(stack(s), Grid(n), BasisTruncation(m)).coeffs(), s.coeffs());
        }
    }
}

TEST(Ensemble, ColumnsAreSamples) {
    const MatrixXd x = oracle::gaussian_matrix(6, 3, 1);
    const FlowEnsemble ens(Grid(3), BasisTruncation(2), x);
    EXPECT_EQ(stack(ens.sample(2)), x.col(2));
    EXPECT_THROW(FlowEnsemble(Grid(3), BasisTruncation(2), MatrixXd::Zero(5, 1)), DimensionError);
    const FlowEnsemble empty(Grid(3), BasisTruncation(2), MatrixXd(6, 0));
    EXPECT_EQ(empty.size(), 0);
}

TEST(L2Inner, Examples) {
    const Grid g(2);
    const BasisTruncation t(1);
    const FlowSample zero(g, t, MatrixXd::Zero(2, 1));
    EXPECT_EQ(l2_inner(zero, zero), 0.0);
    const FlowSample ones(g, t, rows({{1}, {1}}));
    EXPECT_DOUBLE_EQ(l2_inner(ones, ones), 1.0);
    EXPECT_EQ(l2_inner(FlowSample(g, t, rows({{1}, {0}})), FlowSample(g, t, rows({{0}, {1}}))), 0.0);
}

TEST(L2Inner, SymmetricBilinearAndDefinite) {
    const Grid g(7, 1.5);
    const BasisTruncation t(3);
    const FlowSample f(g, t, oracle::gaussian_matrix(7, 3, 1));
    const FlowSample h(g, t, oracle::gaussian_matrix(7, 3, 2));
    const FlowSample fh(g, t, 2.0 * f.coeffs() - 3.0 * h.coeffs());
    EXPECT_DOUBLE_EQ(l2_inner(f, h), l2_inner(h, f));
    EXPECT_NEAR(l2_inner(fh, f), 2.0 * l2_inner(f, f) - 3.0 * l2_inner(h, f), 1e-12);
    EXPECT_GT(l2_inner(f, f), 0.0);
    EXPECT_THROW(l2_inner(f, FlowSample(Grid(7), t, h.coeffs())), DimensionError);
}

TEST(L2Inner, MidpointRuleIsSecondOrder) {
    // f(t) = (sin(pi t), t^2), g(t) = (cos(t), t) on [0,1]:
    // integral = int sin(pi t) cos t dt + int t^3 dt.
    const double pi = std::numbers::pi;
    const double exact = pi * (1.0 + std::cos(1.0)) / (pi * pi - 1.0) + 0.25;
    auto error = [&](Index n) {
        const Grid g(n);
        MatrixXd a(n, 2);
        MatrixXd b(n, 2);
        for (Index k = 0; k < n; ++k) {
            const double t = g.node(k);
            a(k, 0) = std::sin(pi * t);
            a(k, 1) = t * t;
            b(k, 0) = std::cos(t);
            b(k, 1) = t;
        }
        return std::abs(l2_inner(FlowSample(g, BasisTruncation(2), a), FlowSample(g, BasisTruncation(2), b)) - exact);
    };
    for (Index n : {16, 32, 64}) {
        const double ratio = error(n) / error(2 * n);
        EXPECT_NEAR(ratio, 4.0, 0.1) << "n = " << n;
    }
}

TEST(DiscreteKernel, RequiresSymmetry) {
    MatrixXd a = MatrixXd::Identity(4, 4);
    a(0, 3) = 0.5;
    EXPECT_THROW(DiscreteKernel(Grid(2), BasisTruncation(2), a), ArgumentError);
    a(3, 0) = 0.5;
    const DiscreteKernel k(Grid(2), BasisTruncation(2), a);
    EXPECT_EQ(k.block(0, 1)(0, 1), 0.5);
    EXPECT_DOUBLE_EQ(k.scale(), 2.0);
}

TEST(EigenSystem, ValidatesOrderingAndMeasuresDefect) {
    const Grid g(4);
    const BasisTruncation t(1);
    const MatrixXd phi = MatrixXd::Identity(4, 2) / std::sqrt(g.weight());
    const EigenSystem eig(g, t, (VectorXd(2) << 2.0, 1.0).finished(), phi);
    EXPECT_LT(eig.orthonormality_defect(), 1e-15);
    EXPECT_THROW(EigenSystem(g, t, (VectorXd(2) << 1.0, 2.0).finished(), phi), ArgumentError);
    EXPECT_THROW(EigenSystem(g, t, (VectorXd(1) << 1.0).finished(), phi), DimensionError);
}
