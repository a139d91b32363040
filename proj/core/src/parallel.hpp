#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace gibbslab::detail {

inline unsigned worker_count() {
    if (const char* s = std::getenv("GIBBSLAB_WORKERS")) {
        const long v = std::strtol(s, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Runs fn(0..jobs-1) on a worker pool. Jobs must write results into
// preallocated slots keyed by the job index so output does not depend on
// scheduling. The first exception wins and is rethrown after the pool drains.
inline void parallel_for(std::size_t jobs, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(worker_count(), jobs ? jobs : 1);
    if (workers <= 1) {
        for (std::size_t j = 0; j < jobs; ++j) fn(j);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                if (failed.load(std::memory_order_relaxed)) return;
                const std::size_t j = next.fetch_add(1);
                if (j >= jobs) return;
                try {
                    fn(j);
                } catch (...) {
                    {
                        const std::scoped_lock lock(err_mu);
                        if (!err) err = std::current_exception();
                    }
                    failed.store(true, std::memory_order_relaxed);
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace gibbslab::detail
