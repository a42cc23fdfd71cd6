#pragma once

#include <cstdint>
#include <vector>

#include "voxelforest/volume.hpp"

namespace voxelforest {

// Foreground partition of a binary mask. Component ids run 1..C in
// first-encounter (z, y, x) scan order; 0 is background. sizes[i-1] is the
// voxel count of component i.
struct ComponentLabeling {
    std::vector<std::int32_t> labels;
    std::vector<std::size_t> sizes;

    std::size_t component_count() const { return sizes.size(); }
};

// Chebyshev-ball dilation: a voxel is set iff some original foreground voxel
// lies within Chebyshev distance <= radius (equivalently, `radius` rounds of
// 26-connected dilation). radius 0 is the identity. Implemented as three
// separable 1D sliding-window passes.
BinaryMask dilate3d(const BinaryMask& mask, int radius);

// Flood labeling under 6- or 26-adjacency.
ComponentLabeling connected_components(const BinaryMask& mask,
                                       int connectivity = 26);

// Removes small spurious tumor blobs: components of the binarized tumor mask
// (labels {1,2,4}, 26-connectivity) with size < min_fraction * largest
// component size are set to 0. Surviving voxels keep their class labels.
LabelVolume filter_components(const LabelVolume& seg,
                              double min_fraction = 0.10);

}  // namespace voxelforest
