#include "flowkl/random.hpp"

#include <cmath>
#include <numbers>

namespace flowkl {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x464c4f57u /* "FLOW" */};
    return std::mt19937_64(seq);
}

} // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream) : engine_(make_engine(seed, stream)) {}

double RandomStream::uniform() {
    // (x + 0.5) / 2^53 for a 53-bit integer x never hits 0 or 1.
    const std::uint64_t x = engine_() >> 11;
    return (static_cast<double>(x) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

double RandomStream::rademacher() { return (engine_() >> 63) != 0 ? 1.0 : -1.0; }

std::uint64_t RandomStream::below(std::uint64_t bound) {
    if (bound <= 1) {
        return 0;
    }
    // Rejection sampling keeps the draw exactly uniform.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = engine_();
    while (x >= limit) {
        x = engine_();
    }
    return x % bound;
}

} // namespace flowkl
