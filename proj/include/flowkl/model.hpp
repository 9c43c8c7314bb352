#pragma once

// Discretization conventions and value types shared by every module.
//
// A flow chi : T -> H is observed at n midpoint nodes t_k = (k + 1/2) w of
// T = [0, L], w = L / n, through its first m coordinates <chi(t_k), e_i>.
// Samples are stacked node-major, basis-minor: entry k*m + i of the stacked
// vector is <chi(t_k), e_i>. Only d = 1 index sets are implemented; a
// d-dimensional grid would replace Grid and keep the stacked layout.

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace flowkl {

using Index = Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

class Grid {
  public:
    explicit Grid(Index n, double domain_length = 1.0);

    Index n() const noexcept { return n_; }
    double domain_length() const noexcept { return domain_length_; }
    /// Quadrature weight w = |T| / n.
    double weight() const noexcept { return weight_; }
    double node(Index k) const noexcept { return (static_cast<double>(k) + 0.5) * weight_; }
    VectorXd nodes() const;

    friend bool operator==(const Grid& a, const Grid& b) noexcept {
        return a.n_ == b.n_ && a.domain_length_ == b.domain_length_;
    }

  private:
    Index n_;
    double domain_length_;
    double weight_;
};

/// Dimension m of the retained subspace H_m = span{e_1, ..., e_m}.
class BasisTruncation {
  public:
    explicit BasisTruncation(Index m);

    Index m() const noexcept { return m_; }

    friend bool operator==(BasisTruncation a, BasisTruncation b) noexcept { return a.m_ == b.m_; }

  private:
    Index m_;
};

/// One discretized flow; coeffs(k, i) = <chi(t_k), e_i>.
class FlowSample {
  public:
    FlowSample(Grid grid, BasisTruncation trunc, MatrixXd coeffs);

    const Grid& grid() const noexcept { return grid_; }
    BasisTruncation trunc() const noexcept { return trunc_; }
    const MatrixXd& coeffs() const noexcept { return coeffs_; }

  private:
    Grid grid_;
    BasisTruncation trunc_;
    MatrixXd coeffs_;
};

/// N stacked samples as the columns of an (m n) x N matrix.
class FlowEnsemble {
  public:
    FlowEnsemble(Grid grid, BasisTruncation trunc, MatrixXd data);

    const Grid& grid() const noexcept { return grid_; }
    BasisTruncation trunc() const noexcept { return trunc_; }
    const MatrixXd& data() const noexcept { return data_; }
    Index size() const noexcept { return data_.cols(); }
    Index dim() const noexcept { return data_.rows(); }
    FlowSample sample(Index j) const;

  private:
    Grid grid_;
    BasisTruncation trunc_;
    MatrixXd data_;
};

/// Operator-valued kernel on the grid, held as its (m n) x (m n) assembly:
/// block (k, l) is the matrix of K(t_k, t_l) in {e_i}.
class DiscreteKernel {
  public:
    DiscreteKernel(Grid grid, BasisTruncation trunc, MatrixXd assembly);

    const Grid& grid() const noexcept { return grid_; }
    BasisTruncation trunc() const noexcept { return trunc_; }
    const MatrixXd& assembly() const noexcept { return assembly_; }
    Eigen::Block<const MatrixXd> block(Index k, Index l) const {
        const Index m = trunc_.m();
        return assembly_.block(k * m, l * m, m, m);
    }
    /// max_k tr K(t_k, t_k); the natural size of the kernel for tolerances.
    double scale() const;

  private:
    Grid grid_;
    BasisTruncation trunc_;
    MatrixXd assembly_;
};

/// Eigenpairs (lambda_j, Phi_j) of the discretized covariance operator.
/// Eigenflows are stored stacked, one per column, and are orthonormal under
/// the quadrature inner product.
class EigenSystem {
  public:
    EigenSystem(Grid grid, BasisTruncation trunc, VectorXd eigenvalues, MatrixXd eigenflows);

    const Grid& grid() const noexcept { return grid_; }
    BasisTruncation trunc() const noexcept { return trunc_; }
    Index count() const noexcept { return eigenvalues_.size(); }
    const VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
    const MatrixXd& eigenflows() const noexcept { return eigenflows_; }
    FlowSample eigenflow(Index j) const;
    /// max |w Phi^T Phi - I|.
    double orthonormality_defect() const;

  private:
    Grid grid_;
    BasisTruncation trunc_;
    VectorXd eigenvalues_;
    MatrixXd eigenflows_;
};

/// values(j, r) = <chi^j, Phi_r> under quadrature.
struct ScoreMatrix {
    MatrixXd values;
};

VectorXd stack(const FlowSample& sample);
FlowSample unstack(const Eigen::Ref<const VectorXd>& v, const Grid& grid, BasisTruncation trunc);

/// w * sum_k sum_i f(k,i) g(k,i).
double l2_inner(const FlowSample& f, const FlowSample& g);

/// Throws DimensionError unless both grid and truncation agree.
void require_same_discretization(const Grid& ga, BasisTruncation ta, const Grid& gb, BasisTruncation tb,
                                 const char* context);

} // namespace flowkl
