#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace ecx {

/// Process-wide worker count used by grid scans and replicate loops.
/// 0 means "use std::thread::hardware_concurrency()".
int worker_count();
void set_worker_count(int n);

/// Runs fn(chunk_index) for chunk_index in [0, n_chunks). Chunks are claimed
/// from a shared counter, so scheduling is arbitrary, but each chunk writes
/// only its own slot of whatever output the caller prepared. Results are
/// therefore identical for any worker count.
template <class Fn>
void parallel_for_chunks(std::size_t n_chunks, Fn&& fn) {
    const int workers = worker_count();
    if (workers <= 1 || n_chunks <= 1) {
        for (std::size_t i = 0; i < n_chunks; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n_chunks) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min<std::size_t>(workers, n_chunks) - 1;
    pool.reserve(n);
    for (int t = 0; t < n; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
}

/// Deterministic sum-reduction over chunks: per-chunk partials are stored by
/// index and combined in index order, independent of completion order.
template <class T, class Fn>
T parallel_sum(std::size_t n_chunks, Fn&& chunk_value) {
    std::vector<T> partial(n_chunks, T{});
    parallel_for_chunks(n_chunks, [&](std::size_t i) { partial[i] = chunk_value(i); });
    T total{};
    for (const T& v : partial) total += v;
    return total;
}

}  // namespace ecx
