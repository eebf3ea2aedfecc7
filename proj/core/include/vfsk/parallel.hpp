#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace vfsk {

/// Worker count used when the caller passes 0.
inline unsigned default_workers() noexcept {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Calls fn(i) for i in [0, n) on up to `workers` threads (0 = hardware
/// concurrency). Indices are handed out dynamically; results must be written
/// to per-index slots so that the outcome does not depend on scheduling.
/// The first exception thrown by any call is rethrown after all threads join.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    if (workers == 0) workers = default_workers();
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

/// Maps fn over [0, n) concurrently and returns the results in index order.
template <class Fn>
auto parallel_map(std::size_t n, unsigned workers, Fn&& fn) {
    using R = decltype(fn(std::size_t{}));
    std::vector<R> out(n);
    parallel_for(n, workers, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

}  // namespace vfsk
