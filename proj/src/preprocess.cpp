#include "voxelforest/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace voxelforest {

void ReferenceHistogram::validate() const {
    if (cdf.empty() || bin_edges.size() != cdf.size() + 1)
        throw DataError(
            "ReferenceHistogram needs bins+1 edges for bins cdf values");
    for (std::size_t i = 1; i < bin_edges.size(); ++i) {
        if (!(bin_edges[i] > bin_edges[i - 1]))
            throw DataError("ReferenceHistogram bin_edges must be strictly "
                            "increasing");
    }
    double prev = 0.0;
    for (double c : cdf) {
        if (!std::isfinite(c) || c < prev || c > 1.0)
            throw DataError("ReferenceHistogram cdf must be non-decreasing "
                            "within [0, 1]");
        prev = c;
    }
    if (cdf.back() != 1.0)
        throw DataError("ReferenceHistogram cdf must end at 1");
}

BinaryMask brain_mask(const Volume3D& vol) {
    std::vector<std::uint8_t> m(vol.data().size());
    const auto& d = vol.data();
    for (std::size_t i = 0; i < d.size(); ++i) m[i] = d[i] > 0.0 ? 1 : 0;
    return BinaryMask(vol.grid(), std::move(m));
}

namespace {

struct MaskedRange {
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
    std::size_t count = 0;
};

MaskedRange masked_range(const Volume3D& vol, const BinaryMask& mask) {
    if (!vol.grid().same_dims(mask.grid()))
        throw DataError("volume and mask dims disagree");
    MaskedRange r;
    const auto& d = vol.data();
    const auto& m = mask.data();
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (m[i] == 0) continue;
        r.min = std::min(r.min, d[i]);
        r.max = std::max(r.max, d[i]);
        ++r.count;
    }
    return r;
}

// Bin of a value under equal-width binning on [lo, hi]; the top edge is
// folded into the last bin.
int bin_of(double v, double lo, double width, int bins) {
    const int b = static_cast<int>(std::floor((v - lo) / width));
    return std::clamp(b, 0, bins - 1);
}

}  // namespace

Volume3D zscore_normalize(const Volume3D& vol, const BinaryMask& mask) {
    if (!vol.grid().same_dims(mask.grid()))
        throw DataError("volume and mask dims disagree");
    const auto& d = vol.data();
    const auto& m = mask.data();
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (m[i]) {
            sum += d[i];
            ++n;
        }
    }
    if (n == 0) throw DataError("zscore_normalize: mask is empty");
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (m[i]) {
            const double dv = d[i] - mean;
            ss += dv * dv;
        }
    }
    const double stddev = std::sqrt(ss / static_cast<double>(n));
    if (stddev == 0.0)
        throw DataError(
            "zscore_normalize: masked intensities are constant (zero std)");

    std::vector<double> out(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        out[i] = (d[i] - mean) / stddev;
    return Volume3D(vol.grid(), std::move(out));
}

ReferenceHistogram build_reference_histogram(const Volume3D& vol,
                                             const BinaryMask& mask,
                                             int bins) {
    if (bins < 1) throw DataError("histogram bins must be >= 1");
    const MaskedRange r = masked_range(vol, mask);
    if (r.count == 0)
        throw DataError("build_reference_histogram: mask is empty");
    if (r.min == r.max)
        throw DataError(
            "build_reference_histogram: masked value range is degenerate");

    const double width = (r.max - r.min) / bins;
    std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
    const auto& d = vol.data();
    const auto& m = mask.data();
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (m[i])
            ++counts[static_cast<std::size_t>(bin_of(d[i], r.min, width, bins))];
    }

    ReferenceHistogram hist;
    hist.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b)
        hist.bin_edges[static_cast<std::size_t>(b)] = r.min + width * b;
    hist.bin_edges.back() = r.max;

    hist.cdf.resize(static_cast<std::size_t>(bins));
    std::size_t cum = 0;
    for (int b = 0; b < bins; ++b) {
        cum += counts[static_cast<std::size_t>(b)];
        hist.cdf[static_cast<std::size_t>(b)] =
            static_cast<double>(cum) / static_cast<double>(r.count);
    }
    hist.cdf.back() = 1.0;
    hist.validate();
    return hist;
}

Volume3D histogram_match(const Volume3D& src, const ReferenceHistogram& ref,
                         const BinaryMask& mask, int bins) {
    if (bins < 1) throw DataError("histogram bins must be >= 1");
    ref.validate();
    const MaskedRange r = masked_range(src, mask);
    if (r.count == 0) throw DataError("histogram_match: mask is empty");
    if (r.min == r.max)
        throw DataError("histogram_match: masked value range is degenerate");

    // Source CDF at each bin edge (cum[0] = 0, cum[bins] = 1); evaluation
    // interpolates linearly between edges.
    const double width = (r.max - r.min) / bins;
    std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
    const auto& d = src.data();
    const auto& m = mask.data();
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (m[i])
            ++counts[static_cast<std::size_t>(bin_of(d[i], r.min, width, bins))];
    }
    std::vector<double> cum(static_cast<std::size_t>(bins) + 1, 0.0);
    std::size_t running = 0;
    for (int b = 0; b < bins; ++b) {
        running += counts[static_cast<std::size_t>(b)];
        cum[static_cast<std::size_t>(b) + 1] =
            static_cast<double>(running) / static_cast<double>(r.count);
    }
    cum.back() = 1.0;

    const auto source_cdf = [&](double v) {
        double t = (v - r.min) / width;
        t = std::clamp(t, 0.0, static_cast<double>(bins));
        const int b = std::min(static_cast<int>(t), bins - 1);
        const double frac = t - b;
        const double lo = cum[static_cast<std::size_t>(b)];
        const double hi = cum[static_cast<std::size_t>(b) + 1];
        return lo + frac * (hi - lo);
    };

    // Inverse reference CDF. Edge cdf values are refcum[0] = 0 and
    // refcum[j] = ref.cdf[j-1]; invert by locating the first edge whose cdf
    // strictly exceeds u, then interpolating inside the preceding bin. Flat
    // (zero-mass) runs collapse to their left edge, which keeps the mapping
    // monotone.
    const int rb = ref.bins();
    std::vector<double> refcum(static_cast<std::size_t>(rb) + 1, 0.0);
    for (int j = 0; j < rb; ++j)
        refcum[static_cast<std::size_t>(j) + 1] =
            ref.cdf[static_cast<std::size_t>(j)];

    const auto inverse_ref_cdf = [&](double u) {
        if (u >= 1.0) return ref.bin_edges.back();
        const auto it =
            std::upper_bound(refcum.begin() + 1, refcum.end(), u);
        const std::size_t j =
            static_cast<std::size_t>(it - refcum.begin());  // first cdf > u
        const double c0 = refcum[j - 1];
        const double c1 = refcum[j];
        const double e0 = ref.bin_edges[j - 1];
        const double e1 = ref.bin_edges[j];
        return e0 + (u - c0) / (c1 - c0) * (e1 - e0);
    };

    std::vector<double> out = d;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (m[i]) out[i] = inverse_ref_cdf(source_cdf(d[i]));
    }
    return Volume3D(src.grid(), std::move(out));
}

}  // namespace voxelforest
