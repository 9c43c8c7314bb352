#include "flowkl/parallel.hpp"

#include <atomic>

namespace flowkl {

namespace {

std::atomic<unsigned> g_max_threads{0};

} // namespace

void set_max_threads(unsigned threads) { g_max_threads.store(threads); }

unsigned max_threads() {
    const unsigned cap = g_max_threads.load();
    if (cap != 0) {
        return cap;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace flowkl
