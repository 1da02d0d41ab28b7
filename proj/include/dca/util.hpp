#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace dca::detail {

inline unsigned resolve_workers(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Dynamic-chunk parallel loop. body(worker_index, item_index) must only touch
// worker-private or item-private state. First exception wins and is rethrown
// on the calling thread.
template <class Body>
void parallel_for(std::size_t begin, std::size_t end, unsigned workers, Body&& body) {
    const std::size_t total = end > begin ? end - begin : 0;
    if (total == 0) return;
    const unsigned n_workers = static_cast<unsigned>(
        std::min<std::size_t>(resolve_workers(workers), total));
    if (n_workers == 1) {
        for (std::size_t i = begin; i < end; ++i) body(0u, i);
        return;
    }

    const std::size_t chunk = std::max<std::size_t>(1, total / (n_workers * 16));
    std::atomic<std::size_t> next{begin};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::atomic_flag error_claimed = ATOMIC_FLAG_INIT;

    auto run = [&](unsigned worker) {
        try {
            for (;;) {
                const std::size_t lo = next.fetch_add(chunk);
                if (lo >= end || failed.load(std::memory_order_relaxed)) break;
                const std::size_t hi = std::min(end, lo + chunk);
                for (std::size_t i = lo; i < hi; ++i) body(worker, i);
            }
        } catch (...) {
            if (!error_claimed.test_and_set()) error = std::current_exception();
            failed.store(true, std::memory_order_relaxed);
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(n_workers - 1);
    for (unsigned w = 1; w < n_workers; ++w) pool.emplace_back(run, w);
    run(0);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }
    void restart() { start_ = std::chrono::steady_clock::now(); }

private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace dca::detail
