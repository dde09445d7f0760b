#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace pfro::detail {

inline uint32_t resolve_threads(uint32_t requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Contiguous block partition of [0, n): fn(begin, end) per worker. The first
// exception thrown by any worker is rethrown in the caller after all join.
template <class Fn>
void parallel_blocks(uint64_t n, uint32_t threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (n == 0) return;
    if (threads <= 1 || n < 2 * threads) {
        fn(uint64_t{0}, n);
        return;
    }
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    auto guarded = [&](uint64_t b, uint64_t e) {
        try {
            fn(b, e);
        } catch (...) {
            if (!failed.exchange(true)) first_error = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads - 1);
    const uint64_t chunk = n / threads;
    const uint64_t rem = n % threads;
    uint64_t begin = 0;
    for (uint32_t t = 0; t < threads; ++t) {
        const uint64_t end = begin + chunk + (t < rem ? 1 : 0);
        if (t + 1 == threads) {
            guarded(begin, end);
        } else {
            pool.emplace_back(guarded, begin, end);
        }
        begin = end;
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

// Dynamic scheduling: workers pull indices i in [0, n) one at a time from a
// shared counter, so uneven task costs (Monte Carlo replicates) still balance.
template <class Fn>
void parallel_tasks(uint64_t n, uint32_t threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (n == 0) return;
    if (threads <= 1 || n == 1) {
        for (uint64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    if (threads > n) threads = static_cast<uint32_t>(n);
    std::atomic<uint64_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            const uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n || failed.load(std::memory_order_relaxed)) break;
            try {
                fn(i);
            } catch (...) {
                if (!failed.exchange(true)) first_error = std::current_exception();
                break;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads - 1);
    for (uint32_t t = 0; t + 1 < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace pfro::detail
