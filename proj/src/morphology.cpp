#include "voxelforest/morphology.hpp"

#include <algorithm>
#include <utility>

#include "voxelforest/parallel.hpp"

namespace voxelforest {

namespace {

// 1D binary max filter of half-width r along a strided line, via a sliding
// count of set voxels in the clamped window.
void max_filter_line(const std::uint8_t* in, std::uint8_t* out, int len,
                     std::size_t stride, int r) {
    int ones = 0;
    for (int j = 0; j <= std::min(r, len - 1); ++j) ones += in[j * stride] != 0;
    for (int i = 0; i < len; ++i) {
        out[i * stride] = ones > 0 ? 1 : 0;
        const int enter = i + 1 + r;
        const int leave = i - r;
        if (enter < len) ones += in[enter * stride] != 0;
        if (leave >= 0) ones -= in[leave * stride] != 0;
    }
}

}  // namespace

BinaryMask dilate3d(const BinaryMask& mask, int radius) {
    if (radius < 0) throw DataError("dilate3d radius must be >= 0");
    const Grid& g = mask.grid();
    if (radius == 0) return mask;

    const int nx = g.dims[0], ny = g.dims[1], nz = g.dims[2];
    std::vector<std::uint8_t> a = mask.data();
    std::vector<std::uint8_t> b(a.size());

    // x pass: lines are contiguous.
    parallel_for_chunks(static_cast<std::size_t>(ny) * nz,
                        [&](std::size_t lo, std::size_t hi) {
                            for (std::size_t line = lo; line < hi; ++line) {
                                const std::size_t base = line * nx;
                                max_filter_line(a.data() + base,
                                                b.data() + base, nx, 1,
                                                radius);
                            }
                        });
    // y pass: stride nx within each z slab.
    parallel_for_chunks(
        static_cast<std::size_t>(nz) * nx, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t idx = lo; idx < hi; ++idx) {
                const std::size_t z = idx / nx;
                const std::size_t x = idx % nx;
                const std::size_t base =
                    x + z * static_cast<std::size_t>(nx) * ny;
                max_filter_line(b.data() + base, a.data() + base, ny,
                                static_cast<std::size_t>(nx), radius);
            }
        });
    // z pass: stride nx*ny.
    parallel_for_chunks(
        static_cast<std::size_t>(ny) * nx, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t idx = lo; idx < hi; ++idx) {
                max_filter_line(a.data() + idx, b.data() + idx, nz,
                                static_cast<std::size_t>(nx) * ny, radius);
            }
        });
    return BinaryMask(g, std::move(b));
}

ComponentLabeling connected_components(const BinaryMask& mask,
                                       int connectivity) {
    if (connectivity != 6 && connectivity != 26)
        throw DataError("connectivity must be 6 or 26");
    const Grid& g = mask.grid();
    const int nx = g.dims[0], ny = g.dims[1], nz = g.dims[2];
    const auto& in = mask.data();

    std::vector<std::array<int, 3>> offsets;
    if (connectivity == 6) {
        offsets = {{{1, 0, 0}},
                   {{-1, 0, 0}},
                   {{0, 1, 0}},
                   {{0, -1, 0}},
                   {{0, 0, 1}},
                   {{0, 0, -1}}};
    } else {
        for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    if (dx || dy || dz) offsets.push_back({dx, dy, dz});
    }

    ComponentLabeling out;
    out.labels.assign(in.size(), 0);
    std::vector<std::size_t> queue;

    std::int32_t next_id = 0;
    for (int z = 0; z < nz; ++z) {
        for (int y = 0; y < ny; ++y) {
            for (int x = 0; x < nx; ++x) {
                const std::size_t seed = g.index(x, y, z);
                if (in[seed] == 0 || out.labels[seed] != 0) continue;
                ++next_id;
                std::size_t size = 0;
                queue.clear();
                queue.push_back(seed);
                out.labels[seed] = next_id;
                while (!queue.empty()) {
                    const std::size_t cur = queue.back();
                    queue.pop_back();
                    ++size;
                    const int cx = static_cast<int>(cur % nx);
                    const int cy = static_cast<int>((cur / nx) % ny);
                    const int cz = static_cast<int>(cur / (static_cast<std::size_t>(nx) * ny));
                    for (const auto& [dx, dy, dz] : offsets) {
                        const int px = cx + dx, py = cy + dy, pz = cz + dz;
                        if (!g.in_bounds(px, py, pz)) continue;
                        const std::size_t ni = g.index(px, py, pz);
                        if (in[ni] != 0 && out.labels[ni] == 0) {
                            out.labels[ni] = next_id;
                            queue.push_back(ni);
                        }
                    }
                }
                out.sizes.push_back(size);
            }
        }
    }
    return out;
}

LabelVolume filter_components(const LabelVolume& seg, double min_fraction) {
    if (min_fraction < 0.0 || min_fraction > 1.0)
        throw DataError("min_fraction must lie in [0, 1]");
    const auto& labels = seg.data();
    std::vector<std::uint8_t> tumor(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        tumor[i] = labels[i] != 0 ? 1 : 0;

    const ComponentLabeling cc =
        connected_components(BinaryMask(seg.grid(), std::move(tumor)), 26);
    if (cc.component_count() == 0) return seg;

    const std::size_t largest =
        *std::max_element(cc.sizes.begin(), cc.sizes.end());
    const double threshold = min_fraction * static_cast<double>(largest);

    std::vector<std::uint8_t> out = labels;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::int32_t id = cc.labels[i];
        if (id != 0 &&
            static_cast<double>(cc.sizes[static_cast<std::size_t>(id - 1)]) <
                threshold)
            out[i] = 0;
    }
    return LabelVolume(seg.grid(), std::move(out));
}

}  // namespace voxelforest
