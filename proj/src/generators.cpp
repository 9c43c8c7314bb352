#include "flowkl/generators.hpp"

#include "flowkl/error.hpp"
#include "flowkl/parallel.hpp"
#include "flowkl/random.hpp"

#include <cmath>
#include <numbers>

namespace flowkl {

namespace {

void validate(const SeparableBrownianSpec& spec, BasisTruncation trunc) {
    if (static_cast<Index>(spec.mu.size()) != trunc.m()) {
        throw DimensionError("separable Brownian spec has " + std::to_string(spec.mu.size()) +
                             " mu values but m = " + std::to_string(trunc.m()));
    }
    if (spec.j_max < 1) {
        throw ArgumentError("j_max must be at least 1");
    }
    for (std::size_t i = 0; i < spec.mu.size(); ++i) {
        if (!(spec.mu[i] > 0.0) || !std::isfinite(spec.mu[i])) {
            throw ArgumentError("mu must be strictly positive");
        }
        if (i > 0 && spec.mu[i] > spec.mu[i - 1]) {
            throw ArgumentError("mu must be nonincreasing");
        }
    }
}

void require_count(Index count) {
    if (count < 0) {
        throw ArgumentError("sample count must be nonnegative");
    }
}

} // namespace

std::vector<double> default_mu(Index m) {
    std::vector<double> mu(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i) {
        mu[static_cast<std::size_t>(i)] = std::ldexp(1.0, static_cast<int>(-(i + 1)));
    }
    return mu;
}

double brownian_eigenvalue(Index j, double domain_length) {
    const double f = (static_cast<double>(j) - 0.5) * std::numbers::pi / domain_length;
    return 1.0 / (f * f);
}

double brownian_eigenfunction(Index j, double t, double domain_length) {
    return std::sqrt(2.0 / domain_length) *
           std::sin((static_cast<double>(j) - 0.5) * std::numbers::pi * t / domain_length);
}

FlowEnsemble generate_separable_brownian(const SeparableBrownianSpec& spec, const Grid& grid,
                                         BasisTruncation trunc, Index count) {
    validate(spec, trunc);
    require_count(count);
    const Index n = grid.n();
    const Index m = trunc.m();
    const Index modes = spec.j_max;
    const double L = grid.domain_length();

    // basis(k, j) = sqrt(lambda_j) phi_j(t_k)
    MatrixXd basis(n, modes);
    for (Index j = 0; j < modes; ++j) {
        const double s = std::sqrt(brownian_eigenvalue(j + 1, L));
        for (Index k = 0; k < n; ++k) {
            basis(k, j) = s * brownian_eigenfunction(j + 1, grid.node(k), L);
        }
    }
    VectorXd root_mu(m);
    for (Index i = 0; i < m; ++i) {
        root_mu(i) = std::sqrt(spec.mu[static_cast<std::size_t>(i)]);
    }

    MatrixXd data(n * m, count);
    parallel_for(count, [&](std::ptrdiff_t col) {
        RandomStream rng(spec.seed, static_cast<std::uint64_t>(col));
        // xi(j, i), drawn basis-major then mode.
        MatrixXd xi(modes, m);
        for (Index i = 0; i < m; ++i) {
            for (Index j = 0; j < modes; ++j) {
                xi(j, i) = rng.normal();
            }
        }
        const MatrixXd coeffs = (basis * xi) * root_mu.asDiagonal();
        for (Index k = 0; k < n; ++k) {
            for (Index i = 0; i < m; ++i) {
                data(k * m + i, col) = coeffs(k, i);
            }
        }
    });
    return FlowEnsemble(grid, trunc, std::move(data));
}

std::string to_string(CoefficientLaw law) {
    return law == CoefficientLaw::gaussian ? "gaussian" : "rademacher";
}

CoefficientLaw coefficient_law_from_string(const std::string& name) {
    if (name == "gaussian") {
        return CoefficientLaw::gaussian;
    }
    if (name == "rademacher") {
        return CoefficientLaw::rademacher;
    }
    throw ArgumentError("unknown coefficient law '" + name + "'");
}

FlowEnsemble generate_finite_rank(const FiniteRankSpec& spec, Index count) {
    require_count(count);
    const auto rank = static_cast<Index>(spec.eigenvalues.size());
    if (rank < 1 || spec.eigenflows.size() != spec.eigenvalues.size()) {
        throw ArgumentError("finite-rank spec needs as many eigenflows as eigenvalues (and at least one)");
    }
    for (std::size_t r = 0; r < spec.eigenvalues.size(); ++r) {
        if (!(spec.eigenvalues[r] > 0.0) || !std::isfinite(spec.eigenvalues[r])) {
            throw ArgumentError("finite-rank eigenvalues must be positive");
        }
        if (r > 0 && spec.eigenvalues[r] > spec.eigenvalues[r - 1]) {
            throw ArgumentError("finite-rank eigenvalues must be nonincreasing");
        }
    }
    const Grid grid = spec.eigenflows.front().grid();
    const BasisTruncation trunc = spec.eigenflows.front().trunc();
    MatrixXd flows(grid.n() * trunc.m(), rank);
    for (Index r = 0; r < rank; ++r) {
        const FlowSample& f = spec.eigenflows[static_cast<std::size_t>(r)];
        require_same_discretization(grid, trunc, f.grid(), f.trunc(), "generate_finite_rank");
        flows.col(r) = stack(f);
    }
    const MatrixXd gram = grid.weight() * (flows.transpose() * flows);
    const double deviation = (gram - MatrixXd::Identity(rank, rank)).cwiseAbs().maxCoeff();
    if (deviation > 1e-10) {
        throw RankDeficiencyError("finite-rank eigenflows are not quadrature-orthonormal (Gram deviation " +
                                  std::to_string(deviation) + ")");
    }
    VectorXd root_lambda(rank);
    for (Index r = 0; r < rank; ++r) {
        root_lambda(r) = std::sqrt(spec.eigenvalues[static_cast<std::size_t>(r)]);
    }

    MatrixXd data(flows.rows(), count);
    parallel_for(count, [&](std::ptrdiff_t col) {
        RandomStream rng(spec.seed, static_cast<std::uint64_t>(col));
        VectorXd xi(rank);
        for (Index r = 0; r < rank; ++r) {
            xi(r) = spec.coefficient_law == CoefficientLaw::gaussian ? rng.normal() : rng.rademacher();
        }
        data.col(col) = flows * root_lambda.cwiseProduct(xi);
    });
    return FlowEnsemble(grid, trunc, std::move(data));
}

std::vector<FlowSample> orthonormalize(std::span<const FlowSample> raw, double rank_tol) {
    if (raw.empty()) {
        return {};
    }
    const Grid grid = raw.front().grid();
    const BasisTruncation trunc = raw.front().trunc();
    const double w = grid.weight();
    const auto count = static_cast<Index>(raw.size());

    MatrixXd q(grid.n() * trunc.m(), count);
    double leading = 0.0;
    for (Index r = 0; r < count; ++r) {
        const FlowSample& f = raw[static_cast<std::size_t>(r)];
        require_same_discretization(grid, trunc, f.grid(), f.trunc(), "orthonormalize");
        q.col(r) = stack(f);
        leading = std::max(leading, std::sqrt(w * q.col(r).squaredNorm()));
    }

    for (Index r = 0; r < count; ++r) {
        for (int pass = 0; pass < 2; ++pass) {
            for (Index s = 0; s < r; ++s) {
                q.col(r) -= (w * q.col(s).dot(q.col(r))) * q.col(s);
            }
        }
        const double norm = std::sqrt(w * q.col(r).squaredNorm());
        if (!(norm > rank_tol * leading)) {
            throw RankDeficiencyError("flow " + std::to_string(r) +
                                      " is linearly dependent on its predecessors under the quadrature inner product");
        }
        q.col(r) /= norm;
    }

    std::vector<FlowSample> out;
    out.reserve(raw.size());
    for (Index r = 0; r < count; ++r) {
        out.push_back(unstack(q.col(r), grid, trunc));
    }
    return out;
}

FlowEnsemble generate_gaussian_noise(const Grid& grid, BasisTruncation trunc, Index count, std::uint64_t seed) {
    require_count(count);
    MatrixXd data(grid.n() * trunc.m(), count);
    parallel_for(count, [&](std::ptrdiff_t col) {
        RandomStream rng(seed, static_cast<std::uint64_t>(col));
        for (Index r = 0; r < data.rows(); ++r) {
            data(r, col) = rng.normal();
        }
    });
    return FlowEnsemble(grid, trunc, std::move(data));
}

} // namespace flowkl
