#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace voxelforest {

// Runs fn(begin, end) over a contiguous partition of [0, n). Callers must
// write only to disjoint, pre-assigned outputs so the result is identical to
// a sequential run regardless of scheduling.
inline void parallel_for_chunks(
    std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    const unsigned hw = std::thread::hardware_concurrency();
    const std::size_t nthreads =
        std::min<std::size_t>(hw == 0 ? 1 : hw, n);
    if (nthreads <= 1) {
        fn(0, n);
        return;
    }
    const std::size_t chunk = (n + nthreads - 1) / nthreads;
    std::vector<std::thread> workers;
    workers.reserve(nthreads);
    for (std::size_t lo = 0; lo < n; lo += chunk) {
        const std::size_t hi = std::min(lo + chunk, n);
        workers.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& w : workers) w.join();
}

}  // namespace voxelforest
