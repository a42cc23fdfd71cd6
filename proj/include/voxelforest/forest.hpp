#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "voxelforest/features.hpp"
#include "voxelforest/matrix.hpp"
#include "voxelforest/volume.hpp"

namespace voxelforest {

struct ForestParams {
    int n_trees = 50;
    int max_depth = 15;
    int min_samples_leaf = 1;
    int features_per_split = 7;  // floor(sqrt(55))
    bool bootstrap = true;
    // Extra-trees variant: uniformly random split thresholds instead of the
    // best midpoint scan, and no bootstrap resampling.
    bool extra_trees = false;
    std::uint64_t rng_seed = 0;

    void validate(int n_features = kFeatureCount) const;
};

// Flat-array node. Internal nodes route x[feature] < threshold to left,
// otherwise right; leaves carry class-vote counts in class order (0,1,2,4).
struct TreeNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::array<std::uint32_t, kNumClasses> counts{};

    bool is_leaf() const { return left < 0; }
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // root at index 0
};

struct ForestModel {
    ForestParams params;
    std::vector<DecisionTree> trees;
    std::vector<std::string> feature_layout;  // 55 names, train-time copy

    int n_features() const { return static_cast<int>(feature_layout.size()); }
};

// Checks one tree is a proper binary tree: in-bounds, acyclic, every node
// reachable exactly once, depth within max_depth, leaves non-empty, internal
// feature indices within n_features. Throws DataError on violation.
void validate_tree(const DecisionTree& tree, int max_depth, int n_features,
                   int min_samples_leaf = 1);

// Trains params.n_trees trees, each on a bootstrap resample (unless
// disabled), choosing splits by best Gini decrease over features_per_split
// randomly drawn candidate features with thresholds scanned over midpoints
// of sorted unique values. Per-tree seeds derive from params.rng_seed, so
// parallel and sequential training produce identical models.
ForestModel train_forest(const FeatureMatrix& data,
                         const ForestParams& params);

struct Prediction {
    std::vector<std::uint8_t> labels;  // BRATS labels
    Matrix vote_fractions;             // N x 4, rows sum to 1
};

// Soft-vote aggregation: each row is routed down every tree, leaf class
// proportions are averaged, and the label is the argmax (ties to the lower
// class in order 0,1,2,4).
Prediction predict(const ForestModel& model, const Matrix& features);

// Scatter predicted labels back into a volume; unlisted voxels become 0.
// Coordinates must be unique and in bounds.
LabelVolume segmentation_from_predictions(
    const std::vector<std::array<int, 3>>& coords,
    const std::vector<std::uint8_t>& labels, Grid grid);

}  // namespace voxelforest
