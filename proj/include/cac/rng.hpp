#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string_view>
#include <vector>

namespace cac::rng {

// All stochastic draws in the project go through this header so that a run
// is replayable from its config seed alone. mt19937_64 is fully specified by
// the standard; the draw helpers below avoid std::uniform_int_distribution,
// whose output is not pinned down across standard libraries.
using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and a stream tag.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view stream) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the tag
    for (char ch : stream) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    return splitmix64(base ^ splitmix64(h));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(base ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// Unbiased draw in [0, n) by rejection.
inline std::uint64_t uniform_below(Engine& g, std::uint64_t n) {
    assert(n > 0);
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
        v = g();
    } while (v >= limit);
    return v % n;
}

// Inclusive range.
inline int uniform_int(Engine& g, int lo, int hi) {
    assert(lo <= hi);
    return lo + static_cast<int>(uniform_below(g, std::uint64_t(hi) - lo + 1));
}

inline bool coin(Engine& g) { return (g() >> 63) != 0; }

// k distinct values drawn uniformly without replacement from [0, n).
// For k == n this is a full shuffle.
inline std::vector<std::uint32_t> sample_without_replacement(Engine& g,
                                                             std::uint32_t n,
                                                             std::uint32_t k) {
    assert(k <= n);
    std::vector<std::uint32_t> out;
    out.reserve(k);
    if (std::uint64_t(k) * 16 <= n) {
        // sparse case: rejection with a linear scan (k is small here)
        while (out.size() < k) {
            auto v = static_cast<std::uint32_t>(uniform_below(g, n));
            if (std::find(out.begin(), out.end(), v) == out.end()) {
                out.push_back(v);
            }
        }
    } else {
        // partial Fisher-Yates
        std::vector<std::uint32_t> pool(n);
        std::iota(pool.begin(), pool.end(), 0u);
        for (std::uint32_t i = 0; i < k; ++i) {
            auto j = i + static_cast<std::uint32_t>(uniform_below(g, n - i));
            std::swap(pool[i], pool[j]);
            out.push_back(pool[i]);
        }
    }
    return out;
}

}  // namespace cac::rng
