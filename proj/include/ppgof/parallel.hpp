#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ppgof {

inline unsigned default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Runs body(worker_id, claim) on `threads` workers, where claim() hands out
// indices [0, count) in unspecified order and returns count when drained.
// Work item i must depend only on i, never on the claiming worker, so that
// results are identical for every thread count.
template <class Body>
void parallel_workers(std::size_t count, unsigned threads, Body&& body) {
    std::atomic<std::size_t> next{0};
    auto claim = [&next, count]() {
        const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
        return i < count ? i : count;
    };

    if (threads <= 1 || count <= 1) {
        body(0u, claim);
        return;
    }

    const unsigned n_workers = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                body(w, claim);
            } catch (...) {
                if (!failed.exchange(true)) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// Plain parallel loop: f(i) for i in [0, count).
template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& f) {
    parallel_workers(count, threads, [&](unsigned, auto claim) {
        for (std::size_t i = claim(); i < count; i = claim()) f(i);
    });
}

}  // namespace ppgof
