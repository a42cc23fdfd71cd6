#pragma once

#include <vector>

#include "voxelforest/volume.hpp"

namespace voxelforest {

// Cumulative intensity distribution of a reference image over its brain
// mask: bins+1 monotonically increasing edges spanning the masked value
// range, and the normalized cumulative count per bin (non-decreasing, last
// value exactly 1).
struct ReferenceHistogram {
    std::vector<double> bin_edges;  // bins + 1
    std::vector<double> cdf;        // bins

    int bins() const { return static_cast<int>(cdf.size()); }
    void validate() const;
};

// True exactly where the voxel value is > 0 (BRATS volumes are
// skull-stripped with a zero background).
BinaryMask brain_mask(const Volume3D& vol);

// (v - mean) / std with mean and population (1/N) std taken over the masked
// voxels; the same affine map is applied to every voxel, masked or not.
// Errors on an empty mask or zero masked std.
Volume3D zscore_normalize(const Volume3D& vol, const BinaryMask& mask);

ReferenceHistogram build_reference_histogram(const Volume3D& vol,
                                             const BinaryMask& mask,
                                             int bins = 256);

// Standard CDF matching over the masked voxels: each masked value is pushed
// through the piecewise-linear source CDF (built on `bins` equal-width bins
// over the masked range) and then through the piecewise-linear inverse of
// the reference CDF. Unmasked voxels pass through unchanged. The mapping is
// monotone non-decreasing in the input value.
Volume3D histogram_match(const Volume3D& src, const ReferenceHistogram& ref,
                         const BinaryMask& mask, int bins = 256);

}  // namespace voxelforest
