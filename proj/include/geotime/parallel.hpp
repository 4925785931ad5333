#ifndef GEOTIME_PARALLEL_HPP
#define GEOTIME_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace geotime {

inline int default_thread_count() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

/// Runs fn(i) for i in [0, n). Work items must be independent; results are
/// written by index so the outcome does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, int threads = 0) {
    if (threads <= 0) threads = default_thread_count();
    if (threads == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace geotime

#endif  // GEOTIME_PARALLEL_HPP
