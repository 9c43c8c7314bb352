#pragma once

#include <cstdint>
#include <random>

namespace flowkl {

/// Reproducible random stream keyed by (seed, stream id).
///
/// The engine is std::mt19937_64 seeded through std::seed_seq; both are fully
/// specified by the standard, so the raw bit stream is identical on every
/// platform. Normals use Box-Muller on our own 53-bit uniforms rather than
/// std::normal_distribution, whose algorithm is implementation-defined.
class RandomStream {
  public:
    RandomStream(std::uint64_t seed, std::uint64_t stream);

    /// Uniform on the open interval (0, 1).
    double uniform();
    double normal();
    /// +1 or -1 with equal probability.
    double rademacher();
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace flowkl
