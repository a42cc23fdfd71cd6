#include "voxelforest/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "voxelforest/parallel.hpp"
#include "voxelforest/rng.hpp"

namespace voxelforest {

void ForestParams::validate(int n_features) const {
    if (n_trees < 1) throw DataError("n_trees must be >= 1");
    if (max_depth < 1) throw DataError("max_depth must be >= 1");
    if (min_samples_leaf < 1) throw DataError("min_samples_leaf must be >= 1");
    if (features_per_split < 1 || features_per_split > n_features)
        throw DataError("features_per_split must lie in [1, " +
                        std::to_string(n_features) + "]");
}

void validate_tree(const DecisionTree& tree, int max_depth, int n_features,
                   int min_samples_leaf) {
    const auto n = static_cast<std::int32_t>(tree.nodes.size());
    if (n == 0) throw DataError("tree has no nodes");

    std::vector<int> depth(tree.nodes.size(), -1);
    std::vector<std::int32_t> stack = {0};
    depth[0] = 0;
    std::size_t visited = 0;
    while (!stack.empty()) {
        const std::int32_t idx = stack.back();
        stack.pop_back();
        ++visited;
        const TreeNode& node = tree.nodes[static_cast<std::size_t>(idx)];
        if (depth[static_cast<std::size_t>(idx)] > max_depth)
            throw DataError("tree node exceeds max depth");
        if (node.is_leaf()) {
            if (node.right >= 0)
                throw DataError("leaf node has a right child");
            const std::uint64_t total = std::accumulate(
                node.counts.begin(), node.counts.end(), std::uint64_t{0});
            if (total < static_cast<std::uint64_t>(min_samples_leaf))
                throw DataError("leaf vote counts sum below min_samples_leaf");
            continue;
        }
        if (node.feature < 0 || node.feature >= n_features)
            throw DataError("internal node feature index out of range");
        if (!std::isfinite(node.threshold))
            throw DataError("internal node threshold is non-finite");
        for (std::int32_t child : {node.left, node.right}) {
            if (child < 0 || child >= n)
                throw DataError("child index out of bounds");
            if (depth[static_cast<std::size_t>(child)] != -1)
                throw DataError("node reached twice (cycle or shared child)");
            depth[static_cast<std::size_t>(child)] =
                depth[static_cast<std::size_t>(idx)] + 1;
            stack.push_back(child);
        }
    }
    if (visited != tree.nodes.size())
        throw DataError("tree contains unreachable nodes");
}

namespace {

double gini(const std::array<std::uint32_t, kNumClasses>& counts,
            std::uint32_t total) {
    double g = 1.0;
    for (std::uint32_t c : counts) {
        const double p = static_cast<double>(c) / total;
        g -= p * p;
    }
    return g;
}

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = -1.0;
};

class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, const std::vector<std::uint8_t>& y,
                const ForestParams& params, std::uint64_t tree_seed)
        : x_(x), y_(y), params_(params), rng_(tree_seed) {}

    DecisionTree build() {
        const std::size_t n = x_.rows();
        std::vector<std::size_t> rows(n);
        if (params_.bootstrap) {
            for (std::size_t i = 0; i < n; ++i)
                rows[i] = static_cast<std::size_t>(rand_below(rng_, n));
        } else {
            std::iota(rows.begin(), rows.end(), std::size_t{0});
        }
        tree_.nodes.clear();
        grow(std::move(rows), 0);
        return std::move(tree_);
    }

private:
    std::array<std::uint32_t, kNumClasses> class_counts(
        const std::vector<std::size_t>& rows) const {
        std::array<std::uint32_t, kNumClasses> counts{};
        for (std::size_t r : rows) ++counts[static_cast<std::size_t>(y_[r])];
        return counts;
    }

    std::int32_t make_leaf(const std::array<std::uint32_t, kNumClasses>& counts) {
        TreeNode leaf;
        leaf.counts = counts;
        tree_.nodes.push_back(leaf);
        return static_cast<std::int32_t>(tree_.nodes.size() - 1);
    }

    // Best midpoint split on one feature via a sorted (value, class) scan.
    void scan_feature(const std::vector<std::size_t>& rows, int feature,
                      double parent_gini, std::uint32_t total,
                      SplitChoice& best) {
        sorted_.resize(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            sorted_[i] = {x_(rows[i], static_cast<std::size_t>(feature)),
                          y_[rows[i]]};
        std::sort(sorted_.begin(), sorted_.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        std::array<std::uint32_t, kNumClasses> left{};
        std::array<std::uint32_t, kNumClasses> right{};
        for (const auto& [v, c] : sorted_) ++right[c];

        const double n = static_cast<double>(total);
        for (std::size_t i = 0; i + 1 < sorted_.size(); ++i) {
            const auto& [v, c] = sorted_[i];
            ++left[c];
            --right[c];
            if (v == sorted_[i + 1].first) continue;  // not a value boundary
            const std::uint32_t nl = static_cast<std::uint32_t>(i + 1);
            const std::uint32_t nr = total - nl;
            const double child =
                (nl * gini(left, nl) + nr * gini(right, nr)) / n;
            const double gain = parent_gini - child;
            if (gain > best.gain) {
                best.found = true;
                best.feature = feature;
                best.threshold = (v + sorted_[i + 1].first) / 2.0;
                best.gain = gain;
            }
        }
    }

    // Extra-trees split: one uniformly random threshold per candidate
    // feature, evaluated by the same Gini decrease.
    void random_threshold(const std::vector<std::size_t>& rows, int feature,
                          double parent_gini, std::uint32_t total,
                          SplitChoice& best) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t r : rows) {
            const double v = x_(r, static_cast<std::size_t>(feature));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (lo == hi) return;
        const double thr = lo + rand_unit(rng_) * (hi - lo);

        std::array<std::uint32_t, kNumClasses> left{};
        std::array<std::uint32_t, kNumClasses> right{};
        for (std::size_t r : rows) {
            if (x_(r, static_cast<std::size_t>(feature)) < thr)
                ++left[static_cast<std::size_t>(y_[r])];
            else
                ++right[static_cast<std::size_t>(y_[r])];
        }
        const std::uint32_t nl = std::accumulate(left.begin(), left.end(), 0u);
        const std::uint32_t nr = total - nl;
        if (nl == 0 || nr == 0) return;
        const double child = (nl * gini(left, nl) + nr * gini(right, nr)) /
                             static_cast<double>(total);
        const double gain = parent_gini - child;
        if (gain > best.gain) {
            best.found = true;
            best.feature = feature;
            best.threshold = thr;
            best.gain = gain;
        }
    }

    std::int32_t grow(std::vector<std::size_t> rows, int depth) {
        const auto counts = class_counts(rows);
        const auto total = static_cast<std::uint32_t>(rows.size());
        const bool pure =
            std::count(counts.begin(), counts.end(), 0u) == kNumClasses - 1;
        if (depth >= params_.max_depth || pure ||
            total < 2u * static_cast<std::uint32_t>(params_.min_samples_leaf))
            return make_leaf(counts);

        const double parent_gini = gini(counts, total);
        const auto candidates = sample_without_replacement(
            rng_, static_cast<int>(x_.cols()), params_.features_per_split);

        SplitChoice best;
        for (int f : candidates) {
            if (params_.extra_trees)
                random_threshold(rows, f, parent_gini, total, best);
            else
                scan_feature(rows, f, parent_gini, total, best);
        }
        if (!best.found) return make_leaf(counts);

        std::vector<std::size_t> left_rows, right_rows;
        left_rows.reserve(rows.size());
        right_rows.reserve(rows.size());
        for (std::size_t r : rows) {
            if (x_(r, static_cast<std::size_t>(best.feature)) < best.threshold)
                left_rows.push_back(r);
            else
                right_rows.push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        TreeNode node;
        node.feature = best.feature;
        node.threshold = best.threshold;
        tree_.nodes.push_back(node);
        const auto idx = static_cast<std::int32_t>(tree_.nodes.size() - 1);
        const std::int32_t left = grow(std::move(left_rows), depth + 1);
        const std::int32_t right = grow(std::move(right_rows), depth + 1);
        tree_.nodes[static_cast<std::size_t>(idx)].left = left;
        tree_.nodes[static_cast<std::size_t>(idx)].right = right;
        return idx;
    }

    const Matrix& x_;
    const std::vector<std::uint8_t>& y_;
    const ForestParams& params_;
    Rng rng_;
    DecisionTree tree_;
    std::vector<std::pair<double, std::uint8_t>> sorted_;
};

}  // namespace

ForestModel train_forest(const FeatureMatrix& data,
                         const ForestParams& params) {
    params.validate(static_cast<int>(data.values.cols()));
    const std::size_t n = data.values.rows();
    if (n < 2) throw DataError("train_forest: need at least 2 rows");
    if (!data.has_labels())
        throw DataError("train_forest: training data has no labels");

    // Class indices 0..3; rejects unknown label values.
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = static_cast<std::uint8_t>(class_index(data.labels[i]));

    ForestModel model;
    model.params = params;
    model.feature_layout = feature_layout_names();
    if (model.feature_layout.size() != data.values.cols())
        throw DataError("train_forest: feature column count " +
                        std::to_string(data.values.cols()) +
                        " does not match the canonical layout");
    model.trees.resize(static_cast<std::size_t>(params.n_trees));

    parallel_for_chunks(
        static_cast<std::size_t>(params.n_trees),
        [&](std::size_t lo, std::size_t hi) {
            for (std::size_t t = lo; t < hi; ++t) {
                TreeBuilder builder(data.values, y, params,
                                    derive_seed(params.rng_seed, t));
                model.trees[t] = builder.build();
            }
        });
    return model;
}

Prediction predict(const ForestModel& model, const Matrix& features) {
    if (features.cols() != static_cast<std::size_t>(model.n_features()))
        throw DataError("predict: feature matrix has " +
                        std::to_string(features.cols()) +
                        " columns, model expects " +
                        std::to_string(model.n_features()));
    if (model.feature_layout != feature_layout_names())
        throw DataError(
            "predict: model feature layout does not match this build's "
            "canonical layout");

    const std::size_t n = features.rows();
    Prediction pred;
    pred.labels.resize(n);
    pred.vote_fractions = Matrix(n, kNumClasses);

    parallel_for_chunks(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const double* row = features.row(i).data();
            std::array<double, kNumClasses> acc{};
            for (const DecisionTree& tree : model.trees) {
                const TreeNode* node = &tree.nodes[0];
                while (!node->is_leaf()) {
                    const std::size_t next =
                        row[node->feature] < node->threshold
                            ? static_cast<std::size_t>(node->left)
                            : static_cast<std::size_t>(node->right);
                    node = &tree.nodes[next];
                }
                const double total = static_cast<double>(
                    std::accumulate(node->counts.begin(), node->counts.end(),
                                    std::uint64_t{0}));
                for (int c = 0; c < kNumClasses; ++c)
                    acc[static_cast<std::size_t>(c)] +=
                        node->counts[static_cast<std::size_t>(c)] / total;
            }
            int best = 0;
            for (int c = 0; c < kNumClasses; ++c) {
                const double frac = acc[static_cast<std::size_t>(c)] /
                                    model.trees.size();
                pred.vote_fractions(i, static_cast<std::size_t>(c)) = frac;
                if (acc[static_cast<std::size_t>(c)] >
                    acc[static_cast<std::size_t>(best)])
                    best = c;
            }
            pred.labels[i] = class_label(best);
        }
    });
    return pred;
}

LabelVolume segmentation_from_predictions(
    const std::vector<std::array<int, 3>>& coords,
    const std::vector<std::uint8_t>& labels, Grid grid) {
    grid.validate();
    if (coords.size() != labels.size())
        throw DataError(
            "segmentation_from_predictions: coords and labels disagree in "
            "length");
    std::vector<std::uint8_t> out(grid.voxel_count(), 0);
    std::vector<bool> seen(grid.voxel_count(), false);
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const auto [x, y, z] = coords[i];
        if (!grid.in_bounds(x, y, z))
            throw DataError("segmentation_from_predictions: coordinate (" +
                            std::to_string(x) + ", " + std::to_string(y) +
                            ", " + std::to_string(z) + ") is out of bounds");
        const std::size_t idx = grid.index(x, y, z);
        if (seen[idx])
            throw DataError(
                "segmentation_from_predictions: duplicate coordinate (" +
                std::to_string(x) + ", " + std::to_string(y) + ", " +
                std::to_string(z) + ")");
        seen[idx] = true;
        out[idx] = labels[i];
    }
    return LabelVolume(grid, std::move(out));
}

}  // namespace voxelforest
