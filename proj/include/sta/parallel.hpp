#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace sta {

// Index-based parallel map; each index is handled exactly once and workers
// write only to their own slots, so results are deterministic regardless of
// scheduling.
template <class Fn>
void parallel_for(size_t n, int workers, Fn&& fn) {
    if (workers <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
}

}  // namespace sta
