#pragma once

#include <array>
#include <string>
#include <vector>

#include "voxelforest/volume.hpp"

namespace voxelforest {

// BRATS evaluation regions: enhancing tumor {4}, whole tumor {1,2,4},
// tumor core {1,4}.
enum class Region { ET = 0, WT = 1, TC = 2 };

inline const char* region_name(Region r) {
    switch (r) {
        case Region::ET: return "ET";
        case Region::WT: return "WT";
        default: return "TC";
    }
}

struct RegionMasks {
    BinaryMask et;
    BinaryMask wt;
    BinaryMask tc;

    const BinaryMask& of(Region r) const {
        switch (r) {
            case Region::ET: return et;
            case Region::WT: return wt;
            default: return tc;
        }
    }
};

RegionMasks region_masks(const LabelVolume& seg);

// 2|A n B| / (|A| + |B|); both masks empty -> 1 by convention.
double dice(const BinaryMask& a, const BinaryMask& b);

// |pred n truth| / |truth|; empty truth -> 1 by convention.
double sensitivity(const BinaryMask& pred, const BinaryMask& truth);

// |~pred n ~truth| / |~truth|; full-volume truth -> 1 by convention.
double specificity(const BinaryMask& pred, const BinaryMask& truth);

// 95th percentile (nearest-rank) of the pooled symmetric surface distances
// in millimeters: boundary voxels are foreground voxels with a 6-neighbor
// background voxel or a volume edge; each boundary voxel of A contributes
// its spacing-weighted Euclidean distance to the nearest boundary voxel of
// B, and vice versa. Empty-mask conventions: both empty -> 0; exactly one
// empty -> the volume diagonal in mm (finite sentinel).
double hausdorff95(const BinaryMask& a, const BinaryMask& b);

// Length in mm of the volume diagonal; the one-empty-mask HD95 sentinel.
double volume_diagonal_mm(const Grid& grid);

struct RegionMetrics {
    double dice = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
    double hausdorff95_mm = 0.0;
};

struct RegionReport {
    std::string case_id;
    std::array<RegionMetrics, 3> regions;  // indexed by Region

    const RegionMetrics& of(Region r) const {
        return regions[static_cast<std::size_t>(r)];
    }
};

RegionReport evaluate_case(const LabelVolume& pred, const LabelVolume& truth,
                           const std::string& case_id = "");

// CSV with columns case_id,region,dice,sensitivity,specificity,hd95_mm: one
// row per case per region, then per-region "mean" and "std" summary rows
// (population std over cases).
void write_report_csv(const std::string& path,
                      const std::vector<RegionReport>& reports);

}  // namespace voxelforest
