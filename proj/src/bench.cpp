#include "flowkl/bench.hpp"

#include "flowkl/covariance.hpp"
#include "flowkl/error.hpp"
#include "flowkl/generators.hpp"
#include "flowkl/parallel.hpp"
#include "flowkl/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

namespace flowkl {

namespace {

template <typename Fn>
double median_seconds(Index repetitions, Fn&& fn) {
    fn(); // warmup
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(repetitions));
    for (Index r = 0; r < repetitions; ++r) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        const auto stop = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double>(stop - start).count());
    }
    std::sort(times.begin(), times.end());
    const std::size_t mid = times.size() / 2;
    return times.size() % 2 == 1 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
}

std::string host_description() {
    std::string host = "threads=" + std::to_string(std::thread::hardware_concurrency());
    host += " cap=" + std::to_string(max_threads());
#if defined(__clang__)
    host += " compiler=clang-" __clang_version__;
#elif defined(__GNUC__)
    host += " compiler=gcc-" __VERSION__;
#endif
#if defined(EIGEN_WORLD_VERSION)
    host += " eigen=" + std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
            std::to_string(EIGEN_MINOR_VERSION);
#endif
    return host;
}

} // namespace

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw ArgumentError("slope fit needs at least two paired points");
    }
    const auto count = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= count;
    my /= count;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

BenchResult bench_paths(const std::vector<Index>& mn_values, Index m, Index N, Index repetitions,
                        std::uint64_t seed) {
    if (mn_values.size() < 2) {
        throw ArgumentError("bench sweep needs at least two sizes");
    }
    if (repetitions < 5) {
        throw ArgumentError("bench needs at least 5 repetitions");
    }
    if (N < 1) {
        throw ArgumentError("bench needs N >= 1");
    }
    BenchResult result;
    result.m = m;
    result.N = N;
    result.repetitions = repetitions;
    result.host = host_description();

    std::vector<double> log_mn;
    std::vector<double> log_naive;
    std::vector<double> log_svd;
    for (Index mn : mn_values) {
        if (mn < m || mn % m != 0) {
            throw ArgumentError("bench size mn = " + std::to_string(mn) + " is not a multiple of m = " +
                                std::to_string(m));
        }
        const FlowEnsemble ens = generate_gaussian_noise(Grid(mn / m), BasisTruncation(m), N, seed);
        const Index J = std::min(mn, N);
        double sink = 0.0;
        BenchPoint p;
        p.mn = mn;
        p.naive_seconds = median_seconds(repetitions, [&] {
            sink += naive_eigendecomposition(empirical_operator_kernel(ens), J).eigenvalues()(0);
        });
        p.svd_seconds = median_seconds(repetitions, [&] { sink += svd_fast_path(ens, J).eigenvalues()(0); });
        if (!std::isfinite(sink)) {
            throw Error("bench produced a non-finite eigenvalue");
        }
        result.points.push_back(p);
        log_mn.push_back(std::log(static_cast<double>(mn)));
        log_naive.push_back(std::log(p.naive_seconds));
        log_svd.push_back(std::log(p.svd_seconds));
    }
    result.naive_slope = fit_slope(log_mn, log_naive);
    result.svd_slope = fit_slope(log_mn, log_svd);
    return result;
}

nlohmann::json to_json(const BenchResult& r) {
    nlohmann::json points = nlohmann::json::array();
    for (const BenchPoint& p : r.points) {
        points.push_back({{"mn", p.mn}, {"naive_seconds", p.naive_seconds}, {"svd_seconds", p.svd_seconds}});
    }
    return nlohmann::json{{"schema_version", "1"},
                          {"report", "bench"},
                          {"points", std::move(points)},
                          {"m", r.m},
                          {"N", r.N},
                          {"repetitions", r.repetitions},
                          {"naive_slope", r.naive_slope},
                          {"svd_slope", r.svd_slope},
                          {"slope_gap", r.slope_gap()},
                          {"host", r.host}};
}

} // namespace flowkl
