#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace lsfqr {

/// Runs job(0..n_jobs-1) on up to `workers` threads. Results must be written
/// to preallocated per-job slots by the caller so the outcome does not
/// depend on scheduling. The first exception is rethrown after all threads
/// join.
inline void parallel_for(int n_jobs, int workers, const std::function<void(int)>& job) {
    workers = std::max(1, std::min(workers, n_jobs));
    if (workers <= 1) {
        for (int i = 0; i < n_jobs; ++i) job(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = next.fetch_add(1); i < n_jobs; i = next.fetch_add(1)) job(i);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
                next.store(n_jobs);  // drain remaining work
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace lsfqr
