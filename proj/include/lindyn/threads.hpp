#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lindyn {

// Worker count: hardware concurrency capped by the LINDYN_THREADS env var
// (and optionally by `requested` when positive).
inline int thread_budget(int requested = 0) {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (requested > 0) n = std::min(n, requested);
    if (const char* env = std::getenv("LINDYN_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return n;
}

// Static block partition of [0, n). Results must be written into
// preallocated slots indexed by the loop variable so the output order
// never depends on scheduling.
template <class F>
void parallel_for(std::size_t n, F&& body, int requested_threads = 0) {
    const int workers = std::min<std::size_t>(thread_budget(requested_threads), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr first_error;
    std::mutex err_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (std::size_t i = static_cast<std::size_t>(w); i < n;
                     i += static_cast<std::size_t>(workers))
                    body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace lindyn
