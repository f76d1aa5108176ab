#pragma once

#include <cstddef>
#include <cstdlib>
#include <thread>
#include <vector>

namespace cac {

// Runs fn(begin, end) over contiguous chunks of [0, n). Results must be
// written to disjoint, preallocated slots so that the outcome is identical
// for any thread count. With threads <= 1 (or tiny n) everything runs inline.
template <typename Fn>
void parallel_chunks(std::size_t n, unsigned threads, Fn&& fn) {
    if (n == 0) {
        return;
    }
    if (threads > n) {
        threads = static_cast<unsigned>(n);
    }
    if (threads <= 1) {
        fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(threads - 1);
    const std::size_t base = n / threads;
    const std::size_t extra = n % threads;
    std::size_t begin = 0;
    for (unsigned i = 0; i < threads; ++i) {
        const std::size_t end = begin + base + (i < extra ? 1 : 0);
        if (i == threads - 1) {
            fn(begin, end);  // last chunk runs on the calling thread
        } else {
            workers.emplace_back([&fn, begin, end] { fn(begin, end); });
        }
        begin = end;
    }
    for (auto& w : workers) {
        w.join();
    }
}

// CAC_THREADS caps the worker count (useful when several runs share a box).
inline unsigned hardware_threads() {
    if (const char* env = std::getenv("CAC_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) {
            return static_cast<unsigned>(v);
        }
    }
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

}  // namespace cac
