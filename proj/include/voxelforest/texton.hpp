#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "voxelforest/matrix.hpp"
#include "voxelforest/rng.hpp"
#include "voxelforest/volume.hpp"

namespace voxelforest {

// One real even-symmetric Gabor tap grid, DC-corrected to zero sum.
// Square with odd side 2*ceil(3*sigma)+1 (minimum 3); taps are row-major
// over (dy, dx) in [-radius, radius].
struct GaborKernel {
    double theta_deg = 0.0;
    double sigma = 0.0;   // Gaussian envelope, voxels
    double lambda = 0.0;  // sinusoid wavelength, voxels
    int side = 0;
    std::vector<double> taps;

    int radius() const { return (side - 1) / 2; }
    double at(int dx, int dy) const {
        const int r = radius();
        return taps[static_cast<std::size_t>(dy + r) * side +
                    static_cast<std::size_t>(dx + r)];
    }
};

GaborKernel gabor_kernel(double theta_deg, double sigma, double lambda);

// The fixed 120-kernel bank: theta in {0,30,45,60,90,120} degrees, sigma in
// {0.3,0.6,0.9,1.2,1.5}, lambda in {0.8,1.0,1.2,1.5}; ordering is
// theta-major, then sigma, then lambda.
struct GaborBank {
    std::vector<GaborKernel> kernels;

    int size() const { return static_cast<int>(kernels.size()); }
};

GaborBank build_bank();

// Per-voxel filter-response vectors for one modality, voxel-major
// (responses of a voxel are contiguous, in bank order).
struct ResponseVolume {
    Grid grid;
    int n_filters = 0;
    std::vector<double> data;

    std::span<const double> response(std::size_t voxel) const {
        return {data.data() + voxel * static_cast<std::size_t>(n_filters),
                static_cast<std::size_t>(n_filters)};
    }
};

// True 2D convolution (kernel flipped) of every axial slice with every bank
// kernel, clamp-to-edge boundaries.
ResponseVolume filter_volume(const Volume3D& vol, const GaborBank& bank);

// Single-slice core shared by filter_volume and the streaming paths below.
// Writes nx*ny*bank.size() doubles, voxel-major, into out.
void filter_slice(const Volume3D& vol, int z, const GaborBank& bank,
                  std::vector<double>& out);

// k centroids in Gabor-response space for one modality.
struct TextonCodebook {
    Matrix centroids;  // k x bank size
    int modality_index = 0;
    std::uint64_t rng_seed = 0;

    int k() const { return static_cast<int>(centroids.rows()); }
    void validate() const;  // finite centroids, no two identical
};

// Lloyd's algorithm with k-means++ seeding. Deterministic given the seed.
// Stops when the assignment is stable, the max centroid movement drops
// below tol, or max_iters is reached; empty clusters are re-seeded to the
// sample farthest from its assigned centroid. If sse_log is given it
// receives the SSE measured at each assignment pass.
TextonCodebook kmeans_fit(const Matrix& samples, int k, std::uint64_t seed,
                          int max_iters = 100, double tol = 1e-6,
                          int modality_index = 0,
                          std::vector<double>* sse_log = nullptr);

// Per-voxel cluster ids 0..k-1.
struct TextonMap {
    Grid grid;
    int k = 0;
    std::vector<std::uint8_t> ids;

    std::uint8_t at(int x, int y, int z) const {
        return ids[grid.index(x, y, z)];
    }
};

// Nearest centroid by L2 per voxel; ties break toward the lower index.
TextonMap texton_map(const ResponseVolume& responses,
                     const TextonCodebook& codebook);

// Equivalent to texton_map(filter_volume(vol, bank), codebook) but streams
// one slice of responses at a time.
TextonMap compute_texton_map(const Volume3D& vol, const GaborBank& bank,
                             const TextonCodebook& codebook);

// Cluster-id counts over the window x window axial clamped neighborhood of
// the center voxel; counts sum to window^2.
std::vector<std::uint32_t> texton_histogram(const TextonMap& map,
                                            std::array<int, 3> center,
                                            int window = 5);

// Index of the nearest centroid (ties to lowest); d2_out, when non-null,
// receives the squared distance.
int nearest_centroid(std::span<const double> x, const Matrix& centroids,
                     double* d2_out = nullptr);

}  // namespace voxelforest
