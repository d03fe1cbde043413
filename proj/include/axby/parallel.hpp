#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace axby {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Work is handed out
// dynamically, so callers must write results into per-index slots and reduce
// them in index order afterwards. The first exception is rethrown.
template <class Fn>
void parallel_for(size_t n, int threads, Fn&& fn) {
    threads = std::max(1, std::min<int>(threads, static_cast<int>(std::max<size_t>(n, 1))));
    if (threads == 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex m;
    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(m);
                if (!error) error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace axby
