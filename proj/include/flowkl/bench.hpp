#pragma once

// Wall-clock comparison of the naive and SVD spectral paths.

#include "flowkl/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace flowkl {

struct BenchPoint {
    Index mn = 0;
    double naive_seconds = 0.0; ///< median
    double svd_seconds = 0.0;   ///< median
};

struct BenchResult {
    std::vector<BenchPoint> points;
    Index m = 1;
    Index N = 0;
    Index repetitions = 0;
    /// Least-squares slopes of log(time) against log(mn).
    double naive_slope = 0.0;
    double svd_slope = 0.0;
    std::string host;

    double slope_gap() const noexcept { return naive_slope - svd_slope; }
};

/// For each mn (a multiple of m) times `repetitions` runs of each path on a
/// Gaussian ensemble with n = mn / m and N columns, after one warmup run.
BenchResult bench_paths(const std::vector<Index>& mn_values, Index m, Index N, Index repetitions,
                        std::uint64_t seed);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

nlohmann::json to_json(const BenchResult& r);

} // namespace flowkl
