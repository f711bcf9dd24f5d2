#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace warpgeo {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// precondition violations on user-facing entry points
struct domain_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// query at a masked/singular point
struct masked_point_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// a builder could not realize its construction contract
struct construction_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// an adaptive numerical routine could not meet its tolerance
struct tolerance_error : std::runtime_error {
    double achieved = 0.0;
    tolerance_error(const std::string& what, double got)
        : std::runtime_error(what), achieved(got) {}
};

struct accuracy_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double sqr(double x) { return x * x; }

// wrap into [-pi, pi)
inline double wrap_angle(double t) {
    double w = std::remainder(t, two_pi);
    if (w == pi) w = -pi;
    return w;
}

// wrap into [0, 2*pi)
inline double wrap_positive(double t) {
    double w = std::fmod(t, two_pi);
    if (w < 0) w += two_pi;
    return w;
}

// pairwise (cascade) summation: error growth O(log n) in ulps
inline double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& x) {
    return pairwise_sum(x.data(), x.size());
}

namespace detail {

inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

} // namespace detail

inline unsigned worker_count() {
    if (const char* env = std::getenv("WARPGEO_THREADS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

namespace detail {

// round-robin block scheduler shared by the parallel helpers: the block
// partition is fixed (independent of thread count) and the first exception
// thrown by any worker is rethrown after the join
template <class RunBlock>
void run_blocks(std::size_t nblocks, unsigned nw, RunBlock&& run_block) {
    if (nw <= 1 || nblocks <= 1) {
        for (std::size_t b = 0; b < nblocks; ++b) run_block(b);
        return;
    }
    std::atomic<bool> stop{false};
    std::exception_ptr first;
    std::mutex mx;
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (unsigned w = 0; w < nw; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t b = w; b < nblocks; b += nw) {
                if (stop.load(std::memory_order_relaxed)) return;
                try {
                    run_block(b);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(mx);
                    if (!first) first = std::current_exception();
                    stop.store(true, std::memory_order_relaxed);
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

} // namespace detail

// Deterministic parallel map-reduce: the domain is cut into fixed-size blocks
// whose partial sums are combined in block order, so the result is identical
// for every thread count.
template <class Kernel>
double parallel_block_sum(std::size_t n, std::size_t block, Kernel&& kernel) {
    if (n == 0) return 0.0;
    std::size_t nblocks = (n + block - 1) / block;
    std::vector<double> partial(nblocks, 0.0);
    detail::run_blocks(nblocks, worker_count(), [&](std::size_t b) {
        std::size_t lo = b * block, hi = std::min(n, lo + block);
        std::vector<double> vals;
        vals.reserve(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) vals.push_back(kernel(i));
        partial[b] = pairwise_sum(vals);
    });
    return pairwise_sum(partial);
}

// Parallel for over [0, n) with a fixed block partition; side effects must be
// index-local (each i writes only slot i of preallocated storage).
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    if (n == 0) return;
    unsigned nw = worker_count();
    // shrink below 64 only when the range is too short to feed every worker
    std::size_t block = std::max<std::size_t>(1, std::min<std::size_t>(64, (n + nw - 1) / nw));
    std::size_t nblocks = (n + block - 1) / block;
    detail::run_blocks(nblocks, nw, [&, block](std::size_t b) {
        std::size_t lo = b * block, hi = std::min(n, lo + block);
        for (std::size_t i = lo; i < hi; ++i) body(i);
    });
}

} // namespace warpgeo
