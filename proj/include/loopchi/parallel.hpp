// parallel.hpp — fork-join helper with a deterministic reduction contract.
//
// Work is split into chunks indexed 0..count-1; per-chunk results land in a
// slot array and are combined in index order afterwards, so results do not
// depend on the worker count or scheduling.

#pragma once

#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace loopchi {

inline int default_thread_count() {
    if (const char* env = std::getenv("LOOPCHI_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// Runs fn(chunk) for chunk = 0..count-1 on up to `threads` workers with
// static striding.
inline void parallel_chunks(int threads, std::size_t count,
                            const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    const std::size_t nw =
        std::min<std::size_t>(std::max(threads, 1), count);
    if (nw <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (std::size_t w = 0; w < nw; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += nw) fn(i);
        });
    for (auto& t : pool) t.join();
}

// Deterministic map-reduce: sums per-chunk values in chunk order.
template <typename T>
T parallel_sum(int threads, std::size_t count, const std::function<T(std::size_t)>& fn) {
    std::vector<T> slots(count, T{});
    parallel_chunks(threads, count, [&](std::size_t i) { slots[i] = fn(i); });
    T total{};
    for (const T& v : slots) total += v;
    return total;
}

} // namespace loopchi
