#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace fwelnet {

inline int default_thread_count() {
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(i) for i in [0, count). Work items must be independent; callers
/// reduce results by index afterwards so the outcome does not depend on
/// thread count. The first exception thrown by a worker is rethrown.
inline void parallel_for(std::size_t count, int n_threads,
                         const std::function<void(std::size_t)>& fn) {
    if (n_threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::size_t n_workers =
        std::min<std::size_t>(static_cast<std::size_t>(n_threads), count);
    std::vector<std::thread> threads;
    threads.reserve(n_workers);
    for (std::size_t t = 0; t < n_workers; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace fwelnet
