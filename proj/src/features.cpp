#include "voxelforest/features.hpp"

#include <cstdio>
#include <fstream>

#include "voxelforest/morphology.hpp"
#include "voxelforest/parallel.hpp"

namespace voxelforest {

const std::vector<std::string>& feature_layout_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        n.reserve(kFeatureCount);
        for (std::uint8_t label : kClassLabels)
            n.push_back("score_" + std::to_string(label));
        for (int m = 0; m < 3; ++m)
            n.push_back("intensity_m" + std::to_string(m));
        for (int m = 0; m < 3; ++m)
            for (int b = 0; b < kTextonBins; ++b)
                n.push_back("texton_m" + std::to_string(m) + "_bin" +
                            std::to_string(b));
        return n;
    }();
    return names;
}

BinaryMask build_roi(const ScoreMapSet& scores, int margin) {
    if (margin < 0) throw DataError("build_roi: margin must be >= 0");
    const LabelVolume coarse = argmax_labels(scores);
    std::vector<std::uint8_t> tumor(coarse.data().size());
    const auto& lab = coarse.data();
    for (std::size_t i = 0; i < lab.size(); ++i)
        tumor[i] = lab[i] != 0 ? 1 : 0;
    return dilate3d(BinaryMask(coarse.grid(), std::move(tumor)), margin);
}

FeatureMatrix assemble_features(const CaseBundle& bundle,
                                const std::array<TextonMap, 3>& texton_maps,
                                const BinaryMask& roi, int window) {
    const Grid& g = bundle.grid();
    if (!roi.grid().same_dims(g))
        throw DataError("assemble_features: ROI dims disagree with bundle");
    for (int m = 0; m < 3; ++m) {
        if (!texton_maps[static_cast<std::size_t>(m)].grid.same_dims(g))
            throw DataError("assemble_features: texton map " +
                            std::to_string(m) +
                            " dims disagree with bundle");
        if (texton_maps[static_cast<std::size_t>(m)].k != kTextonBins)
            throw DataError("assemble_features: texton map " +
                            std::to_string(m) + " has k != 16");
    }

    // ROI voxels in (z, y, x) scan order, which is strictly lexicographic.
    std::vector<std::array<int, 3>> coords;
    for (int z = 0; z < g.dims[2]; ++z)
        for (int y = 0; y < g.dims[1]; ++y)
            for (int x = 0; x < g.dims[0]; ++x)
                if (roi.at(x, y, z)) coords.push_back({x, y, z});

    FeatureMatrix fm;
    fm.values = Matrix(coords.size(), kFeatureCount);
    fm.coords = std::move(coords);
    const bool with_labels = bundle.ground_truth().has_value();
    if (with_labels) fm.labels.resize(fm.coords.size());

    parallel_for_chunks(fm.coords.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t row = lo; row < hi; ++row) {
            const auto [x, y, z] = fm.coords[row];
            double* out = fm.values.row(row).data();
            int col = 0;
            for (int c = 0; c < kNumClasses; ++c)
                out[col++] = bundle.scores().channel(c).at(x, y, z);
            for (int m = 0; m < 3; ++m)
                out[col++] =
                    bundle.modalities()[static_cast<std::size_t>(m)].at(x, y,
                                                                        z);
            for (int m = 0; m < 3; ++m) {
                const auto hist = texton_histogram(
                    texton_maps[static_cast<std::size_t>(m)], {x, y, z},
                    window);
                for (std::uint32_t count : hist)
                    out[col++] = static_cast<double>(count);
            }
            if (with_labels)
                fm.labels[row] = bundle.ground_truth()->at(x, y, z);
        }
    });
    return fm;
}

void write_features_csv(const std::string& path, const FeatureMatrix& fm) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");

    out << "z,y,x";
    if (fm.has_labels()) out << ",label";
    for (const auto& name : feature_layout_names()) out << ',' << name;
    out << '\n';

    char buf[32];
    for (std::size_t row = 0; row < fm.row_count(); ++row) {
        const auto [x, y, z] = fm.coords[row];
        out << z << ',' << y << ',' << x;
        if (fm.has_labels()) out << ',' << static_cast<int>(fm.labels[row]);
        for (std::size_t c = 0; c < fm.values.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", fm.values(row, c));
            out << ',' << buf;
        }
        out << '\n';
    }
    if (!out) throw DataError("failed while writing " + path);
}

}  // namespace voxelforest
