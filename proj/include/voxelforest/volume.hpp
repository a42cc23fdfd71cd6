#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "voxelforest/error.hpp"

namespace voxelforest {

// BRATS 2017 label convention: 0 background/normal, 1 necrosis/non-enhancing,
// 2 edema, 4 enhancing tumor. Class order everywhere is (0, 1, 2, 4).
inline constexpr int kNumClasses = 4;
inline constexpr std::array<std::uint8_t, kNumClasses> kClassLabels = {0, 1,
                                                                       2, 4};

// Index 0..3 of a BRATS label in the canonical class order.
int class_index(std::uint8_t label);

inline std::uint8_t class_label(int index) {
    return kClassLabels[static_cast<std::size_t>(index)];
}

// Dimensions plus voxel spacing shared by every dense volume type.
// Linear storage is x-fastest: index = x + nx*(y + ny*z).
struct Grid {
    std::array<int, 3> dims{0, 0, 0};              // nx, ny, nz
    std::array<double, 3> spacing{1.0, 1.0, 1.0};  // mm per voxel

    std::size_t voxel_count() const {
        return static_cast<std::size_t>(dims[0]) *
               static_cast<std::size_t>(dims[1]) *
               static_cast<std::size_t>(dims[2]);
    }

    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(dims[0]) *
                   (static_cast<std::size_t>(y) +
                    static_cast<std::size_t>(dims[1]) *
                        static_cast<std::size_t>(z));
    }

    bool in_bounds(int x, int y, int z) const {
        return x >= 0 && x < dims[0] && y >= 0 && y < dims[1] && z >= 0 &&
               z < dims[2];
    }

    bool same_dims(const Grid& other) const { return dims == other.dims; }
    bool same_grid(const Grid& other) const {
        return dims == other.dims && spacing == other.spacing;
    }

    // Throws DataError unless dims are positive and spacing finite positive.
    void validate() const;
};

// One dense scalar field (an MRI modality, a score channel, or any other
// per-voxel real quantity). Immutable after construction; all values finite.
class Volume3D {
public:
    Volume3D(Grid grid, std::vector<double> data);

    static Volume3D filled(Grid grid, double value);

    const Grid& grid() const { return grid_; }
    const std::array<int, 3>& dims() const { return grid_.dims; }
    const std::array<double, 3>& spacing() const { return grid_.spacing; }
    const std::vector<double>& data() const { return data_; }

    double at(int x, int y, int z) const { return data_[grid_.index(x, y, z)]; }

private:
    Grid grid_;
    std::vector<double> data_;
};

// Dense BRATS label field; every value is one of {0, 1, 2, 4}.
class LabelVolume {
public:
    LabelVolume(Grid grid, std::vector<std::uint8_t> data);

    static LabelVolume filled(Grid grid, std::uint8_t value);

    const Grid& grid() const { return grid_; }
    const std::array<int, 3>& dims() const { return grid_.dims; }
    const std::vector<std::uint8_t>& data() const { return data_; }

    std::uint8_t at(int x, int y, int z) const {
        return data_[grid_.index(x, y, z)];
    }

private:
    Grid grid_;
    std::vector<std::uint8_t> data_;
};

// Dense boolean field stored as 0/1 bytes.
class BinaryMask {
public:
    BinaryMask(Grid grid, std::vector<std::uint8_t> data);

    static BinaryMask filled(Grid grid, bool value);

    const Grid& grid() const { return grid_; }
    const std::array<int, 3>& dims() const { return grid_.dims; }
    const std::vector<std::uint8_t>& data() const { return data_; }

    bool at(int x, int y, int z) const {
        return data_[grid_.index(x, y, z)] != 0;
    }

    std::size_t count() const;
    bool empty() const { return count() == 0; }

private:
    Grid grid_;
    std::vector<std::uint8_t> data_;
};

// Exactly four score channels in class order (0, 1, 2, 4), sharing one grid.
class ScoreMapSet {
public:
    explicit ScoreMapSet(std::vector<Volume3D> channels);

    const Grid& grid() const { return channels_.front().grid(); }
    const Volume3D& channel(int class_idx) const {
        return channels_[static_cast<std::size_t>(class_idx)];
    }
    const std::vector<Volume3D>& channels() const { return channels_; }

private:
    std::vector<Volume3D> channels_;
};

// One case: the three feature modalities, the four score maps, and the
// optional ground truth. All member volumes share dims and spacing.
class CaseBundle {
public:
    CaseBundle(std::string case_id, std::vector<Volume3D> modalities,
               ScoreMapSet scores, std::optional<LabelVolume> ground_truth);

    const std::string& case_id() const { return case_id_; }
    const std::vector<Volume3D>& modalities() const { return modalities_; }
    const ScoreMapSet& scores() const { return scores_; }
    const std::optional<LabelVolume>& ground_truth() const {
        return ground_truth_;
    }
    const Grid& grid() const { return scores_.grid(); }

private:
    std::string case_id_;
    std::vector<Volume3D> modalities_;
    ScoreMapSet scores_;
    std::optional<LabelVolume> ground_truth_;
};

// Values of the (2*half+1)^2 axial (fixed-z) square window centered on the
// voxel, row-major (y outer, x inner); out-of-bounds positions clamp to the
// nearest in-bounds voxel. The center must lie strictly inside dims.
std::vector<double> window_values(const Volume3D& vol,
                                  std::array<int, 3> center, int half);
std::vector<std::uint8_t> window_values(const LabelVolume& vol,
                                        std::array<int, 3> center, int half);

// Per voxel, the BRATS label of the strongest score channel; ties break
// toward the lower channel index, so background wins an all-equal tie.
LabelVolume argmax_labels(const ScoreMapSet& scores);

}  // namespace voxelforest
