#include "voxelforest/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "voxelforest/parallel.hpp"

namespace voxelforest {

RegionMasks region_masks(const LabelVolume& seg) {
    const auto& lab = seg.data();
    std::vector<std::uint8_t> et(lab.size()), wt(lab.size()), tc(lab.size());
    for (std::size_t i = 0; i < lab.size(); ++i) {
        const std::uint8_t l = lab[i];
        et[i] = l == 4 ? 1 : 0;
        wt[i] = l != 0 ? 1 : 0;
        tc[i] = (l == 1 || l == 4) ? 1 : 0;
    }
    return RegionMasks{BinaryMask(seg.grid(), std::move(et)),
                       BinaryMask(seg.grid(), std::move(wt)),
                       BinaryMask(seg.grid(), std::move(tc))};
}

namespace {

void require_same_dims(const BinaryMask& a, const BinaryMask& b) {
    if (!a.grid().same_dims(b.grid()))
        throw DataError("mask dims disagree");
}

}  // namespace

double dice(const BinaryMask& a, const BinaryMask& b) {
    require_same_dims(a, b);
    const auto& da = a.data();
    const auto& db = b.data();
    std::size_t na = 0, nb = 0, both = 0;
    for (std::size_t i = 0; i < da.size(); ++i) {
        na += da[i];
        nb += db[i];
        both += da[i] & db[i];
    }
    if (na + nb == 0) return 1.0;
    return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

double sensitivity(const BinaryMask& pred, const BinaryMask& truth) {
    require_same_dims(pred, truth);
    const auto& dp = pred.data();
    const auto& dt = truth.data();
    std::size_t tp = 0, t = 0;
    for (std::size_t i = 0; i < dp.size(); ++i) {
        t += dt[i];
        tp += dp[i] & dt[i];
    }
    if (t == 0) return 1.0;
    return static_cast<double>(tp) / static_cast<double>(t);
}

double specificity(const BinaryMask& pred, const BinaryMask& truth) {
    require_same_dims(pred, truth);
    const auto& dp = pred.data();
    const auto& dt = truth.data();
    std::size_t tn = 0, n = 0;
    for (std::size_t i = 0; i < dp.size(); ++i) {
        n += dt[i] == 0;
        tn += (dp[i] == 0) & (dt[i] == 0);
    }
    if (n == 0) return 1.0;
    return static_cast<double>(tn) / static_cast<double>(n);
}

double volume_diagonal_mm(const Grid& grid) {
    const double dx = grid.dims[0] * grid.spacing[0];
    const double dy = grid.dims[1] * grid.spacing[1];
    const double dz = grid.dims[2] * grid.spacing[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

namespace {

// Foreground voxels with at least one 6-neighbor background voxel, counting
// the volume border as background.
std::vector<std::array<int, 3>> boundary_voxels(const BinaryMask& mask) {
    const Grid& g = mask.grid();
    std::vector<std::array<int, 3>> out;
    for (int z = 0; z < g.dims[2]; ++z) {
        for (int y = 0; y < g.dims[1]; ++y) {
            for (int x = 0; x < g.dims[0]; ++x) {
                if (!mask.at(x, y, z)) continue;
                const bool edge =
                    x == 0 || x == g.dims[0] - 1 || y == 0 ||
                    y == g.dims[1] - 1 || z == 0 || z == g.dims[2] - 1;
                if (edge || !mask.at(x - 1, y, z) || !mask.at(x + 1, y, z) ||
                    !mask.at(x, y - 1, z) || !mask.at(x, y + 1, z) ||
                    !mask.at(x, y, z - 1) || !mask.at(x, y, z + 1))
                    out.push_back({x, y, z});
            }
        }
    }
    return out;
}

// Directed nearest-boundary distances, spacing-weighted, one per source
// voxel. Brute force over boundary pairs; boundary sets at desk scale stay
// small enough that this is exact and fast.
void directed_distances(const std::vector<std::array<int, 3>>& from,
                        const std::vector<std::array<int, 3>>& to,
                        const std::array<double, 3>& spacing,
                        std::vector<double>& out) {
    const std::size_t offset = out.size();
    out.resize(offset + from.size());
    parallel_for_chunks(from.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const auto& [ax, ay, az] = from[i];
            double best = std::numeric_limits<double>::infinity();
            for (const auto& [bx, by, bz] : to) {
                const double dx = (ax - bx) * spacing[0];
                const double dy = (ay - by) * spacing[1];
                const double dz = (az - bz) * spacing[2];
                const double d2 = dx * dx + dy * dy + dz * dz;
                if (d2 < best) best = d2;
            }
            out[offset + i] = std::sqrt(best);
        }
    });
}

}  // namespace

double hausdorff95(const BinaryMask& a, const BinaryMask& b) {
    if (!a.grid().same_grid(b.grid()))
        throw DataError("hausdorff95: dims or spacing disagree");

    const auto ba = boundary_voxels(a);
    const auto bb = boundary_voxels(b);
    if (ba.empty() && bb.empty()) return 0.0;
    if (ba.empty() || bb.empty()) return volume_diagonal_mm(a.grid());

    std::vector<double> pooled;
    pooled.reserve(ba.size() + bb.size());
    directed_distances(ba, bb, a.grid().spacing, pooled);
    directed_distances(bb, ba, a.grid().spacing, pooled);

    std::sort(pooled.begin(), pooled.end());
    const auto n = pooled.size();
    const auto rank = static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(n)));  // 1-based nearest rank
    return pooled[std::max<std::size_t>(rank, 1) - 1];
}

RegionReport evaluate_case(const LabelVolume& pred, const LabelVolume& truth,
                           const std::string& case_id) {
    if (!pred.grid().same_grid(truth.grid()))
        throw DataError("evaluate_case: dims or spacing disagree");
    const RegionMasks pm = region_masks(pred);
    const RegionMasks tm = region_masks(truth);

    RegionReport report;
    report.case_id = case_id;
    for (Region r : {Region::ET, Region::WT, Region::TC}) {
        const BinaryMask& p = pm.of(r);
        const BinaryMask& t = tm.of(r);
        RegionMetrics& m = report.regions[static_cast<std::size_t>(r)];
        m.dice = dice(p, t);
        m.sensitivity = sensitivity(p, t);
        m.specificity = specificity(p, t);
        m.hausdorff95_mm = hausdorff95(p, t);
    }
    return report;
}

void write_report_csv(const std::string& path,
                      const std::vector<RegionReport>& reports) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out << "case_id,region,dice,sensitivity,specificity,hd95_mm\n";

    char buf[512];
    const auto emit = [&](const std::string& id, Region r,
                          const RegionMetrics& m) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%.17g,%.17g,%.17g,%.17g\n",
                      id.c_str(), region_name(r), m.dice, m.sensitivity,
                      m.specificity, m.hausdorff95_mm);
        out << buf;
    };

    for (const RegionReport& rep : reports)
        for (Region r : {Region::ET, Region::WT, Region::TC})
            emit(rep.case_id, r, rep.of(r));

    if (reports.empty()) return;
    const double n = static_cast<double>(reports.size());
    for (Region r : {Region::ET, Region::WT, Region::TC}) {
        RegionMetrics mean{}, var{};
        for (const RegionReport& rep : reports) {
            const RegionMetrics& m = rep.of(r);
            mean.dice += m.dice;
            mean.sensitivity += m.sensitivity;
            mean.specificity += m.specificity;
            mean.hausdorff95_mm += m.hausdorff95_mm;
        }
        mean.dice /= n;
        mean.sensitivity /= n;
        mean.specificity /= n;
        mean.hausdorff95_mm /= n;
        for (const RegionReport& rep : reports) {
            const RegionMetrics& m = rep.of(r);
            var.dice += (m.dice - mean.dice) * (m.dice - mean.dice) / n;
            var.sensitivity += (m.sensitivity - mean.sensitivity) *
                               (m.sensitivity - mean.sensitivity) / n;
            var.specificity += (m.specificity - mean.specificity) *
                               (m.specificity - mean.specificity) / n;
            var.hausdorff95_mm += (m.hausdorff95_mm - mean.hausdorff95_mm) *
                                  (m.hausdorff95_mm - mean.hausdorff95_mm) / n;
        }
        emit("mean", r, mean);
        emit("std", r,
             RegionMetrics{std::sqrt(var.dice), std::sqrt(var.sensitivity),
                           std::sqrt(var.specificity),
                           std::sqrt(var.hausdorff95_mm)});
    }
    if (!out) throw DataError("failed while writing " + path);
}

}  // namespace voxelforest
