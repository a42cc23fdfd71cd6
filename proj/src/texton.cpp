#include "voxelforest/texton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "voxelforest/parallel.hpp"

namespace voxelforest {

GaborKernel gabor_kernel(double theta_deg, double sigma, double lambda) {
    if (!(sigma > 0.0)) throw DataError("gabor_kernel: sigma must be > 0");
    if (!(lambda > 0.0)) throw DataError("gabor_kernel: lambda must be > 0");

    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    const int side = 2 * radius + 1;
    const double theta = theta_deg * std::numbers::pi / 180.0;
    const double ct = std::cos(theta);
    const double st = std::sin(theta);

    GaborKernel k;
    k.theta_deg = theta_deg;
    k.sigma = sigma;
    k.lambda = lambda;
    k.side = side;
    k.taps.resize(static_cast<std::size_t>(side) * side);

    double sum = 0.0;
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            const double xp = dx * ct + dy * st;
            const double yp = -dx * st + dy * ct;
            const double v =
                std::exp(-(xp * xp + yp * yp) / (2.0 * sigma * sigma)) *
                std::cos(2.0 * std::numbers::pi * xp / lambda);
            k.taps[static_cast<std::size_t>(dy + radius) * side +
                   static_cast<std::size_t>(dx + radius)] = v;
            sum += v;
        }
    }
    const double mean = sum / static_cast<double>(k.taps.size());
    for (double& t : k.taps) t -= mean;
    return k;
}

GaborBank build_bank() {
    static constexpr double kThetas[] = {0, 30, 45, 60, 90, 120};
    static constexpr double kSigmas[] = {0.3, 0.6, 0.9, 1.2, 1.5};
    static constexpr double kLambdas[] = {0.8, 1.0, 1.2, 1.5};

    GaborBank bank;
    bank.kernels.reserve(120);
    for (double theta : kThetas)
        for (double sigma : kSigmas)
            for (double lambda : kLambdas)
                bank.kernels.push_back(gabor_kernel(theta, sigma, lambda));
    return bank;
}

namespace {

// Clamp-to-edge padded copy of one axial slice, border width r.
void pad_slice(const double* slice, int nx, int ny, int r,
               std::vector<double>& padded) {
    const int pw = nx + 2 * r;
    const int ph = ny + 2 * r;
    padded.resize(static_cast<std::size_t>(pw) * ph);
    for (int py = 0; py < ph; ++py) {
        const int sy = std::clamp(py - r, 0, ny - 1);
        const double* srow = slice + static_cast<std::size_t>(sy) * nx;
        double* drow = padded.data() + static_cast<std::size_t>(py) * pw;
        for (int px = 0; px < pw; ++px)
            drow[px] = srow[std::clamp(px - r, 0, nx - 1)];
    }
}

}  // namespace

void filter_slice(const Volume3D& vol, int z, const GaborBank& bank,
                  std::vector<double>& out) {
    const Grid& g = vol.grid();
    const int nx = g.dims[0], ny = g.dims[1];
    const std::size_t npix = static_cast<std::size_t>(nx) * ny;
    const int nk = bank.size();
    out.resize(npix * static_cast<std::size_t>(nk));

    const double* slice = vol.data().data() + g.index(0, 0, z);

    // Pad once per distinct kernel radius so the convolution loops are
    // clamp-free; convolution = correlation with the flipped tap grid.
    std::vector<double> padded;
    std::vector<double> flipped;
    std::vector<double> conv(npix);
    int padded_radius = -1;

    for (int ki = 0; ki < nk; ++ki) {
        const GaborKernel& k = bank.kernels[static_cast<std::size_t>(ki)];
        const int r = k.radius();
        const int s = k.side;
        if (r != padded_radius) {
            pad_slice(slice, nx, ny, r, padded);
            padded_radius = r;
        }
        flipped.resize(k.taps.size());
        for (int j = 0; j < s * s; ++j)
            flipped[static_cast<std::size_t>(j)] =
                k.taps[static_cast<std::size_t>(s * s - 1 - j)];

        const int pw = nx + 2 * r;
        for (int y = 0; y < ny; ++y) {
            for (int x = 0; x < nx; ++x) {
                double acc = 0.0;
                for (int jy = 0; jy < s; ++jy) {
                    const double* prow = padded.data() +
                                         static_cast<std::size_t>(y + jy) * pw +
                                         x;
                    const double* krow =
                        flipped.data() + static_cast<std::size_t>(jy) * s;
                    for (int jx = 0; jx < s; ++jx) acc += krow[jx] * prow[jx];
                }
                conv[static_cast<std::size_t>(y) * nx + x] = acc;
            }
        }
        for (std::size_t pix = 0; pix < npix; ++pix)
            out[pix * static_cast<std::size_t>(nk) +
                static_cast<std::size_t>(ki)] = conv[pix];
    }
}

ResponseVolume filter_volume(const Volume3D& vol, const GaborBank& bank) {
    const Grid& g = vol.grid();
    const std::size_t npix =
        static_cast<std::size_t>(g.dims[0]) * g.dims[1];
    const int nk = bank.size();

    ResponseVolume rv;
    rv.grid = g;
    rv.n_filters = nk;
    rv.data.resize(g.voxel_count() * static_cast<std::size_t>(nk));

    parallel_for_chunks(
        static_cast<std::size_t>(g.dims[2]),
        [&](std::size_t lo, std::size_t hi) {
            std::vector<double> slice_out;
            for (std::size_t z = lo; z < hi; ++z) {
                filter_slice(vol, static_cast<int>(z), bank, slice_out);
                std::copy(slice_out.begin(), slice_out.end(),
                          rv.data.begin() +
                              static_cast<std::size_t>(z) * npix * nk);
            }
        });
    return rv;
}

void TextonCodebook::validate() const {
    const std::size_t kk = centroids.rows();
    const std::size_t d = centroids.cols();
    if (kk == 0 || d == 0) throw DataError("TextonCodebook is empty");
    for (double v : centroids.data()) {
        if (!std::isfinite(v))
            throw DataError("TextonCodebook centroid is non-finite");
    }
    for (std::size_t a = 0; a < kk; ++a) {
        for (std::size_t b = a + 1; b < kk; ++b) {
            bool same = true;
            for (std::size_t j = 0; j < d && same; ++j)
                same = centroids(a, j) == centroids(b, j);
            if (same)
                throw DataError("TextonCodebook centroids " +
                                std::to_string(a) + " and " +
                                std::to_string(b) + " are identical");
        }
    }
}

int nearest_centroid(std::span<const double> x, const Matrix& centroids,
                     double* d2_out) {
    const std::size_t k = centroids.rows();
    const std::size_t d = centroids.cols();
    int best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
        const double* cen = centroids.row(c).data();
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = x[j] - cen[j];
            acc += diff * diff;
            if (acc > best_d2) break;  // prunes strict losers only
        }
        if (acc < best_d2) {
            best_d2 = acc;
            best = static_cast<int>(c);
        }
    }
    if (d2_out) *d2_out = best_d2;
    return best;
}

namespace {

// Assignment pass; returns SSE. Parallel over samples, outputs pre-assigned.
double assign_all(const Matrix& samples, const Matrix& centroids,
                  std::vector<int>& assign, std::vector<double>& d2) {
    const std::size_t m = samples.rows();
    assign.resize(m);
    d2.resize(m);
    parallel_for_chunks(m, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            assign[i] = nearest_centroid(samples.row(i), centroids, &d2[i]);
    });
    double sse = 0.0;
    for (std::size_t i = 0; i < m; ++i) sse += d2[i];
    return sse;
}

}  // namespace

TextonCodebook kmeans_fit(const Matrix& samples, int k, std::uint64_t seed,
                          int max_iters, double tol, int modality_index,
                          std::vector<double>* sse_log) {
    const std::size_t m = samples.rows();
    const std::size_t d = samples.cols();
    if (k < 1) throw DataError("kmeans_fit: k must be >= 1");
    if (m < static_cast<std::size_t>(k))
        throw DataError("kmeans_fit: fewer samples than clusters");
    for (double v : samples.data()) {
        if (!std::isfinite(v))
            throw DataError("kmeans_fit: samples contain non-finite values");
    }

    Rng rng(seed);
    Matrix centroids(static_cast<std::size_t>(k), d);

    // k-means++ seeding.
    std::vector<double> d2(m, std::numeric_limits<double>::infinity());
    {
        const std::size_t first = rand_below(rng, m);
        std::copy_n(samples.row(first).data(), d, centroids.row(0).data());
        for (int c = 1; c < k; ++c) {
            double total = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                double acc = 0.0;
                const double* prev = centroids.row(c - 1).data();
                const double* x = samples.row(i).data();
                for (std::size_t j = 0; j < d; ++j) {
                    const double diff = x[j] - prev[j];
                    acc += diff * diff;
                }
                d2[i] = std::min(d2[i], acc);
                total += d2[i];
            }
            if (total == 0.0)
                throw DataError(
                    "kmeans_fit: samples contain fewer than k distinct "
                    "points");
            const double target = rand_unit(rng) * total;
            double run = 0.0;
            std::size_t pick = m - 1;
            for (std::size_t i = 0; i < m; ++i) {
                run += d2[i];
                if (run > target) {
                    pick = i;
                    break;
                }
            }
            std::copy_n(samples.row(pick).data(), d,
                        centroids.row(c).data());
        }
    }

    std::vector<int> assign;
    std::vector<int> prev_assign;
    std::vector<std::size_t> cluster_size(static_cast<std::size_t>(k));

    for (int iter = 0; iter < max_iters; ++iter) {
        const double sse = assign_all(samples, centroids, assign, d2);
        if (sse_log) sse_log->push_back(sse);
        if (iter > 0 && assign == prev_assign) break;  // exact fixed point

        // Update step: sequential accumulation in sample order.
        Matrix sums(static_cast<std::size_t>(k), d);
        std::fill(cluster_size.begin(), cluster_size.end(), std::size_t{0});
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t c = static_cast<std::size_t>(assign[i]);
            ++cluster_size[c];
            double* srow = sums.row(c).data();
            const double* x = samples.row(i).data();
            for (std::size_t j = 0; j < d; ++j) srow[j] += x[j];
        }

        double max_shift2 = 0.0;
        for (int c = 0; c < k; ++c) {
            const std::size_t cs = cluster_size[static_cast<std::size_t>(c)];
            if (cs == 0) {
                // Re-seed to the sample farthest from its centroid; zero its
                // distance so a second empty cluster picks another sample.
                std::size_t far = 0;
                for (std::size_t i = 1; i < m; ++i)
                    if (d2[i] > d2[far]) far = i;
                std::copy_n(samples.row(far).data(), d,
                            centroids.row(static_cast<std::size_t>(c)).data());
                d2[far] = 0.0;
                max_shift2 = std::numeric_limits<double>::infinity();
                continue;
            }
            double shift2 = 0.0;
            double* crow = centroids.row(static_cast<std::size_t>(c)).data();
            const double* srow = sums.row(static_cast<std::size_t>(c)).data();
            for (std::size_t j = 0; j < d; ++j) {
                const double nv = srow[j] / static_cast<double>(cs);
                const double diff = nv - crow[j];
                shift2 += diff * diff;
                crow[j] = nv;
            }
            max_shift2 = std::max(max_shift2, shift2);
        }
        prev_assign = assign;
        if (max_shift2 < tol * tol) break;
    }

    TextonCodebook cb;
    cb.centroids = std::move(centroids);
    cb.modality_index = modality_index;
    cb.rng_seed = seed;
    cb.validate();
    return cb;
}

TextonMap texton_map(const ResponseVolume& responses,
                     const TextonCodebook& codebook) {
    if (static_cast<std::size_t>(responses.n_filters) !=
        codebook.centroids.cols())
        throw DataError("texton_map: response width " +
                        std::to_string(responses.n_filters) +
                        " does not match centroid width " +
                        std::to_string(codebook.centroids.cols()));
    TextonMap map;
    map.grid = responses.grid;
    map.k = codebook.k();
    const std::size_t n = responses.grid.voxel_count();
    map.ids.resize(n);
    parallel_for_chunks(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            map.ids[i] = static_cast<std::uint8_t>(
                nearest_centroid(responses.response(i), codebook.centroids));
    });
    return map;
}

TextonMap compute_texton_map(const Volume3D& vol, const GaborBank& bank,
                             const TextonCodebook& codebook) {
    if (static_cast<std::size_t>(bank.size()) != codebook.centroids.cols())
        throw DataError(
            "compute_texton_map: bank size does not match centroid width");
    const Grid& g = vol.grid();
    const std::size_t npix =
        static_cast<std::size_t>(g.dims[0]) * g.dims[1];
    const int nk = bank.size();

    TextonMap map;
    map.grid = g;
    map.k = codebook.k();
    map.ids.resize(g.voxel_count());

    parallel_for_chunks(
        static_cast<std::size_t>(g.dims[2]),
        [&](std::size_t lo, std::size_t hi) {
            std::vector<double> slice_out;
            for (std::size_t z = lo; z < hi; ++z) {
                filter_slice(vol, static_cast<int>(z), bank, slice_out);
                for (std::size_t pix = 0; pix < npix; ++pix) {
                    const std::span<const double> x{
                        slice_out.data() + pix * static_cast<std::size_t>(nk),
                        static_cast<std::size_t>(nk)};
                    map.ids[z * npix + pix] = static_cast<std::uint8_t>(
                        nearest_centroid(x, codebook.centroids));
                }
            }
        });
    return map;
}

std::vector<std::uint32_t> texton_histogram(const TextonMap& map,
                                            std::array<int, 3> center,
                                            int window) {
    if (window < 1 || window % 2 == 0)
        throw DataError("texton_histogram: window must be odd and >= 1");
    const Grid& g = map.grid;
    const auto [cx, cy, cz] = center;
    if (!g.in_bounds(cx, cy, cz))
        throw DataError("texton_histogram: center is out of bounds");

    const int half = window / 2;
    std::vector<std::uint32_t> bins(static_cast<std::size_t>(map.k), 0);
    for (int dy = -half; dy <= half; ++dy) {
        const int y = std::clamp(cy + dy, 0, g.dims[1] - 1);
        for (int dx = -half; dx <= half; ++dx) {
            const int x = std::clamp(cx + dx, 0, g.dims[0] - 1);
            ++bins[map.at(x, y, cz)];
        }
    }
    return bins;
}

}  // namespace voxelforest
