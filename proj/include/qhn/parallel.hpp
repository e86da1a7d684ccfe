#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace qhn {

inline int default_threads() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(i) for i in [0, count) across up to n_threads workers. Work items
// must be independent; results written to disjoint slots stay deterministic
// regardless of scheduling.
template <class Fn>
void parallel_for(std::uint64_t count, int n_threads, Fn&& fn) {
    n_threads = std::max(1, n_threads);
    if (n_threads == 1 || count <= 1) {
        for (std::uint64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (std::uint64_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> pool;
    const int workers = static_cast<int>(std::min<std::uint64_t>(n_threads, count));
    pool.reserve(workers - 1);
    for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

// Same, but hands out contiguous index blocks; better for cache-heavy sweeps.
template <class Fn>
void parallel_for_blocks(std::uint64_t count, int n_threads, std::uint64_t block, Fn&& fn) {
    const std::uint64_t n_blocks = (count + block - 1) / block;
    parallel_for(n_blocks, n_threads, [&](std::uint64_t b) {
        const std::uint64_t lo = b * block;
        const std::uint64_t hi = std::min(count, lo + block);
        for (std::uint64_t i = lo; i < hi; ++i) fn(i);
    });
}

}  // namespace qhn
