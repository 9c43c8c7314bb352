#pragma once

// Seeded synthetic ensembles with analytically known spectra.
//
// Sample j always draws from RandomStream(seed, j), so output is bit-identical
// for any thread count.

#include "flowkl/model.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace flowkl {

/// chi(t) = sum_{j <= j_max} sum_i sqrt(lambda_j mu_i) xi_{j,i} phi_j(t) e_i,
/// the Brownian-in-time, C_0 = diag(mu) in H flow with kernel min(s,t) C_0.
struct SeparableBrownianSpec {
    std::vector<double> mu;
    Index j_max = 1;
    std::uint64_t seed = 0;
};

/// mu_i = 2^{-i}, i = 1..m.
std::vector<double> default_mu(Index m);

/// Eigenvalue of min(s,t) on [0, L]: (L / ((j - 1/2) pi))^2, j >= 1.
double brownian_eigenvalue(Index j, double domain_length = 1.0);
/// Eigenfunction of min(s,t) on [0, L]: sqrt(2/L) sin((j - 1/2) pi t / L).
///
/// On the midpoint grid these are exactly orthonormal under quadrature for
/// j <= n (they form the DST-IV basis), so the truncated kernel has them as
/// exact discrete eigenvectors.
double brownian_eigenfunction(Index j, double t, double domain_length = 1.0);

FlowEnsemble generate_separable_brownian(const SeparableBrownianSpec& spec, const Grid& grid,
                                         BasisTruncation trunc, Index count);

enum class CoefficientLaw { gaussian, rademacher };

std::string to_string(CoefficientLaw law);
CoefficientLaw coefficient_law_from_string(const std::string& name);

/// The expansion run forward: chi^j = sum_r sqrt(lambda_r) xi_{j,r} Phi_r.
struct FiniteRankSpec {
    std::vector<double> eigenvalues;
    std::vector<FlowSample> eigenflows;
    CoefficientLaw coefficient_law = CoefficientLaw::gaussian;
    std::uint64_t seed = 0;
};

/// Throws ArgumentError on bad eigenvalues or shapes and RankDeficiencyError
/// when the eigenflows' Gram matrix deviates from I by more than 1e-10.
FlowEnsemble generate_finite_rank(const FiniteRankSpec& spec, Index count);

/// Modified Gram-Schmidt (two passes) under the quadrature inner product.
/// Throws RankDeficiencyError when a pivot falls below
/// `rank_tol` times the largest input norm.
std::vector<FlowSample> orthonormalize(std::span<const FlowSample> raw, double rank_tol = 1e-10);

/// Ensemble of i.i.d. standard normal entries; used by benches and property tests.
FlowEnsemble generate_gaussian_noise(const Grid& grid, BasisTruncation trunc, Index count, std::uint64_t seed);

} // namespace flowkl
