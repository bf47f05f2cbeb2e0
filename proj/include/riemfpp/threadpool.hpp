#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace riemfpp {

/// Run fn(i) for i in [0, n) on up to `threads` workers. Results must be
/// written into preassigned slots so the outcome is independent of
/// scheduling. The first exception wins and is rethrown on the caller.
inline void parallel_for(int64_t n, int threads, const std::function<void(int64_t)>& fn) {
    if (threads <= 0) threads = int(std::thread::hardware_concurrency());
    if (threads <= 1 || n <= 1) {
        for (int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            int64_t i = next.fetch_add(1);
            if (i >= n || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int64_t>(threads, n); ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed.load()) std::rethrow_exception(error);
}

}  // namespace riemfpp
