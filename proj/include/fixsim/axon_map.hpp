#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fixsim/geometry.hpp"

namespace fixsim {

// Parameters of the nerve fiber bundle trajectory model. Bundles are
// spiral polylines seeded around the optic disc; the disc-centered angle
// relaxes exponentially toward the raphe (+-180 deg) with constant tau as
// the disc-centered radius grows from r0 to r_max in steps of dr.
//
// The model is deliberately kept behind this parameter struct: fitted
// anatomical constants can replace the defaults from a config file without
// touching any call site.
struct TrajectoryParams {
    uint32_t n_bundles = 500;
    double r0_deg = 2.0;
    double r_max_deg = 45.0;
    double dr_deg = 0.25;
    double tau_deg = 45.0;
    VisualFieldPoint optic_disc_deg{15.0, 2.0};
    double um_per_deg = kDefaultUmPerDeg;

    bool operator==(const TrajectoryParams&) const = default;
};

// One fiber bundle polyline, ordered from the optic disc outward.
// arc_um[k] is the cumulative arc length at vertex k; arc_um[0] = 0.
struct AxonBundle {
    std::vector<float> x_um;
    std::vector<float> y_um;
    std::vector<float> arc_um;

    size_t size() const { return x_um.size(); }
};

// (bundle, vertex) pair naming the soma location assigned to a pixel.
struct SomaRef {
    uint32_t bundle = 0;
    uint32_t vertex = 0;

    bool operator==(const SomaRef&) const = default;
};

// Precomputed geometry for percept rendering: bundle polylines plus the
// per-pixel soma assignment for one render window/raster. Immutable once
// built; shared read-only across threads.
struct AxonMap {
    TrajectoryParams params;
    std::vector<AxonBundle> bundles;
    RenderWindow window;
    uint32_t rows = 0;
    uint32_t cols = 0;
    std::vector<SomaRef> soma_of_pixel;  // row-major, rows * cols entries

    // Flat views rebuilt by finalize(); not part of the serialized state.
    std::vector<float> flat_x, flat_y, flat_arc;
    std::vector<uint32_t> bundle_offset;  // n_bundles + 1 entries

    size_t n_pixels() const { return static_cast<size_t>(rows) * cols; }
    size_t flat_index(const SomaRef& s) const { return bundle_offset[s.bundle] + s.vertex; }
    void finalize();
};

void validate_trajectory_params(const TrajectoryParams& params);

std::vector<AxonBundle> build_bundles(const TrajectoryParams& params);

// Nearest bundle vertex to p in Euclidean micrometers; ties go to the
// lower bundle id, then the lower vertex index.
SomaRef assign_soma(const RetinalPoint& p, const std::vector<AxonBundle>& bundles);

// Uniform spatial hash over bundle vertices. Accelerates nearest-vertex
// queries; results are defined to be identical to assign_soma.
class VertexHash {
public:
    VertexHash(const std::vector<AxonBundle>& bundles, double cell_um);
    SomaRef nearest(const RetinalPoint& p) const;

private:
    const std::vector<AxonBundle>& bundles_;
    double cell_um_;
    double x0_ = 0.0, y0_ = 0.0;
    int nx_ = 0, ny_ = 0;
    std::vector<uint32_t> cell_start_;  // CSR layout, nx*ny + 1 entries
    std::vector<SomaRef> entries_;
};

// Builds bundles and assigns a soma to the center of every render pixel.
// Bit-for-bit deterministic for fixed inputs, independent of thread count.
AxonMap build_axon_map(const RenderWindow& window, int rows, int cols,
                       const TrajectoryParams& params);

// Binary cache, magic "AXMP", little-endian throughout:
//   magic (4 bytes) | u32 version = 1 | u64 fnv1a64(params block ++ window ++ dims)
//   params block: u32 n_bundles, f64 r0, r_max, dr, tau, disc_x, disc_y, um_per_deg
//   u32 bundle count, per bundle u32 vertex count + (f32 x, f32 y, f32 arc) triples
//   window as 4 x f64 (x_min, x_max, y_min, y_max) | dims as u32 rows, u32 cols
//   rows*cols pairs of (u32 bundle, u32 vertex)
void save_axon_map(const AxonMap& map, const std::string& path);

// Throws BadMagicError / BadVersionError / CorruptFileError (truncation,
// out-of-range indices, or header hash not matching file content).
AxonMap load_axon_map(const std::string& path);

// As load_axon_map, but additionally throws StaleCacheError when the cache
// was built for different (params, window, dims) than expected.
AxonMap load_axon_map_checked(const std::string& path, const TrajectoryParams& params,
                              const RenderWindow& window, int rows, int cols);

// Cache key shared by the file header and the on-disk cache naming scheme.
uint64_t axon_map_content_hash(const TrajectoryParams& params, const RenderWindow& window,
                               int rows, int cols);

bool axon_maps_equal(const AxonMap& a, const AxonMap& b);

}  // namespace fixsim
