#include "voxelforest/volume.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace voxelforest {

int class_index(std::uint8_t label) {
    switch (label) {
        case 0: return 0;
        case 1: return 1;
        case 2: return 2;
        case 4: return 3;
        default:
            throw DataError("unknown BRATS label " + std::to_string(label) +
                            " (expected one of 0, 1, 2, 4)");
    }
}

void Grid::validate() const {
    for (int d : dims) {
        if (d <= 0) throw DataError("grid dims must be positive");
    }
    for (double s : spacing) {
        if (!std::isfinite(s) || s <= 0.0)
            throw DataError("grid spacing must be finite and > 0");
    }
}

Volume3D::Volume3D(Grid grid, std::vector<double> data)
    : grid_(grid), data_(std::move(data)) {
    grid_.validate();
    if (data_.size() != grid_.voxel_count())
        throw DataError("Volume3D data length does not equal nx*ny*nz");
    for (double v : data_) {
        if (!std::isfinite(v))
            throw DataError("Volume3D contains a non-finite value");
    }
}

Volume3D Volume3D::filled(Grid grid, double value) {
    grid.validate();
    return Volume3D(grid, std::vector<double>(grid.voxel_count(), value));
}

LabelVolume::LabelVolume(Grid grid, std::vector<std::uint8_t> data)
    : grid_(grid), data_(std::move(data)) {
    grid_.validate();
    if (data_.size() != grid_.voxel_count())
        throw DataError("LabelVolume data length does not equal nx*ny*nz");
    for (std::uint8_t v : data_) {
        if (v != 0 && v != 1 && v != 2 && v != 4)
            throw DataError("LabelVolume contains label " + std::to_string(v) +
                            " outside {0, 1, 2, 4}");
    }
}

LabelVolume LabelVolume::filled(Grid grid, std::uint8_t value) {
    grid.validate();
    return LabelVolume(grid,
                       std::vector<std::uint8_t>(grid.voxel_count(), value));
}

BinaryMask::BinaryMask(Grid grid, std::vector<std::uint8_t> data)
    : grid_(grid), data_(std::move(data)) {
    grid_.validate();
    if (data_.size() != grid_.voxel_count())
        throw DataError("BinaryMask data length does not equal nx*ny*nz");
    for (std::uint8_t v : data_) {
        if (v > 1) throw DataError("BinaryMask values must be 0 or 1");
    }
}

BinaryMask BinaryMask::filled(Grid grid, bool value) {
    grid.validate();
    return BinaryMask(
        grid, std::vector<std::uint8_t>(grid.voxel_count(), value ? 1 : 0));
}

std::size_t BinaryMask::count() const {
    return static_cast<std::size_t>(
        std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

ScoreMapSet::ScoreMapSet(std::vector<Volume3D> channels)
    : channels_(std::move(channels)) {
    if (channels_.size() != kNumClasses)
        throw DataError("ScoreMapSet requires exactly 4 channels, got " +
                        std::to_string(channels_.size()));
    for (std::size_t i = 1; i < channels_.size(); ++i) {
        if (!channels_[i].grid().same_grid(channels_[0].grid()))
            throw DataError("ScoreMapSet channel " + std::to_string(i) +
                            " disagrees on dims/spacing with channel 0");
    }
}

CaseBundle::CaseBundle(std::string case_id, std::vector<Volume3D> modalities,
                       ScoreMapSet scores,
                       std::optional<LabelVolume> ground_truth)
    : case_id_(std::move(case_id)),
      modalities_(std::move(modalities)),
      scores_(std::move(scores)),
      ground_truth_(std::move(ground_truth)) {
    if (modalities_.size() != 3)
        throw DataError("CaseBundle requires exactly 3 modalities, got " +
                        std::to_string(modalities_.size()));
    const Grid& g = scores_.grid();
    for (std::size_t i = 0; i < modalities_.size(); ++i) {
        if (!modalities_[i].grid().same_grid(g))
            throw DataError("CaseBundle modality " + std::to_string(i) +
                            " disagrees on dims/spacing with score maps");
    }
    if (ground_truth_ && !ground_truth_->grid().same_grid(g))
        throw DataError(
            "CaseBundle ground truth disagrees on dims/spacing with score "
            "maps");
}

namespace {

template <typename VolT, typename T>
std::vector<T> window_values_impl(const VolT& vol, std::array<int, 3> center,
                                  int half) {
    if (half < 0) throw DataError("window half size must be >= 0");
    const Grid& g = vol.grid();
    const auto [cx, cy, cz] = center;
    if (!g.in_bounds(cx, cy, cz))
        throw DataError("window center (" + std::to_string(cx) + ", " +
                        std::to_string(cy) + ", " + std::to_string(cz) +
                        ") is outside volume dims");
    const int side = 2 * half + 1;
    std::vector<T> out;
    out.reserve(static_cast<std::size_t>(side) * static_cast<std::size_t>(side));
    for (int dy = -half; dy <= half; ++dy) {
        const int y = std::clamp(cy + dy, 0, g.dims[1] - 1);
        for (int dx = -half; dx <= half; ++dx) {
            const int x = std::clamp(cx + dx, 0, g.dims[0] - 1);
            out.push_back(vol.at(x, y, cz));
        }
    }
    return out;
}

}  // namespace

std::vector<double> window_values(const Volume3D& vol,
                                  std::array<int, 3> center, int half) {
    return window_values_impl<Volume3D, double>(vol, center, half);
}

std::vector<std::uint8_t> window_values(const LabelVolume& vol,
                                        std::array<int, 3> center, int half) {
    return window_values_impl<LabelVolume, std::uint8_t>(vol, center, half);
}

LabelVolume argmax_labels(const ScoreMapSet& scores) {
    const Grid& g = scores.grid();
    const std::size_t n = g.voxel_count();
    std::vector<std::uint8_t> labels(n);
    const std::array<const std::vector<double>*, kNumClasses> chan = {
        &scores.channel(0).data(), &scores.channel(1).data(),
        &scores.channel(2).data(), &scores.channel(3).data()};
    for (std::size_t i = 0; i < n; ++i) {
        int best = 0;
        double best_score = (*chan[0])[i];
        for (int c = 1; c < kNumClasses; ++c) {
            const double s = (*chan[c])[i];
            if (s > best_score) {
                best_score = s;
                best = c;
            }
        }
        labels[i] = class_label(best);
    }
    return LabelVolume(g, std::move(labels));
}

}  // namespace voxelforest
