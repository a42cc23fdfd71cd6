#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace voxelforest {

// mt19937_64 has a fully specified output sequence, and the helpers below
// avoid std::*_distribution (whose mappings are implementation-defined), so
// every seeded draw in the toolkit is reproducible across platforms.
using Rng = std::mt19937_64;

// splitmix64 finalizer; derives independent stream seeds from a master seed
// (per-tree, per-modality, per-stage).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + (stream + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Unbiased integer in [0, n), n > 0, by rejection.
inline std::uint64_t rand_below(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = n * (~std::uint64_t{0} / n);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double rand_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller (cosine branch; one fresh pair per call).
inline double rand_normal(Rng& rng) {
    const double u1 = 1.0 - rand_unit(rng);  // (0, 1]
    const double u2 = rand_unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

// k distinct indices from [0, n) by partial Fisher-Yates, in draw order.
inline std::vector<int> sample_without_replacement(Rng& rng, int n, int k) {
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    std::vector<int> picked;
    picked.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k && i < n; ++i) {
        const auto j = i + static_cast<int>(rand_below(
                               rng, static_cast<std::uint64_t>(n - i)));
        std::swap(pool[static_cast<std::size_t>(i)],
                  pool[static_cast<std::size_t>(j)]);
        picked.push_back(pool[static_cast<std::size_t>(i)]);
    }
    return picked;
}

}  // namespace voxelforest
