#pragma once

// Streaming mean/variance accumulation with an associative merge, the
// Estimate record every Monte Carlo operation returns, and the
// deterministic chunked parallel driver.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace bmlab::stats {

// Welford accumulator; merge is Chan's pairwise update, associative and
// order-independent up to rounding.
struct Accumulator {
    long long n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double delta = x - mean;
        mean += delta / n;
        m2 += delta * (x - mean);
    }

    void merge(const Accumulator& other) {
        if (other.n == 0) return;
        if (n == 0) {
            *this = other;
            return;
        }
        const double delta = other.mean - mean;
        const long long total = n + other.n;
        mean += delta * other.n / total;
        m2 += other.m2 + delta * delta * (static_cast<double>(n) * other.n) / total;
        n = total;
    }

    double variance() const { return n > 1 ? m2 / (n - 1) : 0.0; }
};

struct Estimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    long long n = 0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    uint64_t seed = 0;

    static Estimate from(const Accumulator& acc, uint64_t seed) {
        Estimate e;
        e.mean = acc.mean;
        e.n = acc.n;
        e.stderr_ = acc.n > 1 ? std::sqrt(acc.variance() / acc.n) : 0.0;
        e.ci_lo = e.mean - 1.96 * e.stderr_;
        e.ci_hi = e.mean + 1.96 * e.stderr_;
        e.seed = seed;
        return e;
    }
};

// True iff the 95% intervals of a and b overlap.
inline bool ci_overlap(const Estimate& a, const Estimate& b) {
    return a.ci_lo <= b.ci_hi && b.ci_lo <= a.ci_hi;
}

// Deterministic chunked fold: work is split into fixed-size chunks
// (independent of `workers`), each chunk gets its own RNG stream derived
// from (seed, chunk index) by the caller, and per-chunk results are merged
// in chunk order.  `Acc` needs a default constructor and merge(const Acc&).
template <typename Acc, typename ChunkFn>
Acc run_chunks(long long n_items, long long chunk_size, int workers,
               ChunkFn&& fn) {
    if (n_items <= 0) throw std::invalid_argument("run_chunks: n_items <= 0");
    if (chunk_size <= 0) chunk_size = 1;
    const long long n_chunks = (n_items + chunk_size - 1) / chunk_size;
    std::vector<Acc> partial(static_cast<size_t>(n_chunks));

    workers = std::max(1, workers);
    if (workers == 1) {
        for (long long c = 0; c < n_chunks; ++c) {
            const long long begin = c * chunk_size;
            const long long end = std::min(n_items, begin + chunk_size);
            fn(c, begin, end, partial[static_cast<size_t>(c)]);
        }
    } else {
        std::vector<std::thread> pool;
        std::atomic<long long> next{0};
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                for (;;) {
                    const long long c = next.fetch_add(1);
                    if (c >= n_chunks) return;
                    const long long begin = c * chunk_size;
                    const long long end = std::min(n_items, begin + chunk_size);
                    fn(c, begin, end, partial[static_cast<size_t>(c)]);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    Acc total;
    for (const Acc& p : partial) total.merge(p);
    return total;
}

constexpr long long kDefaultChunk = 8192;

}  // namespace bmlab::stats
