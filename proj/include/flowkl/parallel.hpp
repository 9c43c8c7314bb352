#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace flowkl {

/// Caps the number of worker threads used by the library (0 restores the
/// hardware default). Results never depend on this setting.
void set_max_threads(unsigned threads);
unsigned max_threads();

/// Calls fn(i) for i in [0, count), split into contiguous chunks across at
/// most max_threads() workers. fn must only write state owned by index i.
template <typename Fn>
void parallel_for(std::ptrdiff_t count, Fn&& fn) {
    if (count <= 0) {
        return;
    }
    const auto workers = static_cast<std::ptrdiff_t>(std::min<std::ptrdiff_t>(max_threads(), count));
    if (workers <= 1) {
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    const std::ptrdiff_t chunk = (count + workers - 1) / workers;
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (std::ptrdiff_t w = 0; w < workers; ++w) {
        const std::ptrdiff_t begin = w * chunk;
        const std::ptrdiff_t end = std::min(count, begin + chunk);
        if (begin >= end) {
            break;
        }
        pool.emplace_back([&fn, begin, end] {
            for (std::ptrdiff_t i = begin; i < end; ++i) {
                fn(i);
            }
        });
    }
}

} // namespace flowkl
