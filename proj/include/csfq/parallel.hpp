#pragma once

// Deterministic parallel map: task i writes slot i, reductions happen in
// index order after the join, so results are identical for any thread count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace csfq::parallel {

inline int& max_threads_ref() {
    static int n = static_cast<int>(std::thread::hardware_concurrency());
    return n;
}

inline void set_max_threads(int n) { max_threads_ref() = n > 0 ? n : 1; }
inline int max_threads() { return max_threads_ref() > 0 ? max_threads_ref() : 1; }

template <typename F>
void parallel_for(std::size_t n, F&& fn) {
    const int threads = static_cast<int>(std::min<std::size_t>(max_threads(), n));
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::exception_ptr err;
    std::mutex err_mutex;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err) err = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace csfq::parallel
