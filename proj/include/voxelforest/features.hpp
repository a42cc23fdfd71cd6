#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "voxelforest/matrix.hpp"
#include "voxelforest/texton.hpp"
#include "voxelforest/volume.hpp"

namespace voxelforest {

inline constexpr int kFeatureCount = 55;
inline constexpr int kTextonBins = 16;

// Canonical 55-column layout: 4 score channels, 3 modality intensities,
// then 3 x 16 texton-histogram bins. Training and prediction must agree on
// this exactly; the model file stores a copy for a hard skew check.
const std::vector<std::string>& feature_layout_names();

// Per-voxel feature rows plus the voxel each row came from, in strictly
// increasing (z, y, x) order. labels is empty, or one BRATS label per row.
struct FeatureMatrix {
    Matrix values;  // N x 55
    std::vector<std::array<int, 3>> coords;
    std::vector<std::uint8_t> labels;

    std::size_t row_count() const { return values.rows(); }
    bool has_labels() const { return !labels.empty(); }
};

// Coarse tumor mask from the score-map argmax (labels {1,2,4}) dilated by
// `margin` voxels (Chebyshev ball). An all-background argmax yields an
// empty ROI.
BinaryMask build_roi(const ScoreMapSet& scores, int margin = 10);

// One feature row per ROI voxel: the 4 score values, the 3 preprocessed
// modality intensities, and the three per-modality texton histograms over a
// window x window axial neighborhood. Labels come from the bundle's ground
// truth when present.
FeatureMatrix assemble_features(const CaseBundle& bundle,
                                const std::array<TextonMap, 3>& texton_maps,
                                const BinaryMask& roi, int window = 5);

// Debug export: header = z,y,x[,label],<55 layout names>; one row per voxel.
void write_features_csv(const std::string& path, const FeatureMatrix& fm);

}  // namespace voxelforest
