#include "fixsim/axon_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "binary_io.hpp"
#include "fixsim/errors.hpp"

namespace fixsim {

namespace {

constexpr uint32_t kAxmpVersion = 1;
constexpr char kAxmpMagic[4] = {'A', 'X', 'M', 'P'};

// Candidate ordering for nearest-vertex queries: squared distance first,
// then bundle id, then vertex index. Strict lexicographic comparison makes
// the assignment independent of visit order.
struct Candidate {
    double dist_sq = std::numeric_limits<double>::infinity();
    SomaRef soma{0, 0};

    bool beats(const Candidate& other) const {
        if (dist_sq != other.dist_sq) return dist_sq < other.dist_sq;
        if (soma.bundle != other.soma.bundle) return soma.bundle < other.soma.bundle;
        return soma.vertex < other.soma.vertex;
    }
};

void append_params_block(std::vector<uint8_t>& buf, const TrajectoryParams& p) {
    detail::put_u32(buf, p.n_bundles);
    detail::put_f64(buf, p.r0_deg);
    detail::put_f64(buf, p.r_max_deg);
    detail::put_f64(buf, p.dr_deg);
    detail::put_f64(buf, p.tau_deg);
    detail::put_f64(buf, p.optic_disc_deg.x_deg);
    detail::put_f64(buf, p.optic_disc_deg.y_deg);
    detail::put_f64(buf, p.um_per_deg);
}

void append_window_dims(std::vector<uint8_t>& buf, const RenderWindow& w, uint32_t rows,
                        uint32_t cols) {
    detail::put_f64(buf, w.x_min_um);
    detail::put_f64(buf, w.x_max_um);
    detail::put_f64(buf, w.y_min_um);
    detail::put_f64(buf, w.y_max_um);
    detail::put_u32(buf, rows);
    detail::put_u32(buf, cols);
}

}  // namespace

void validate_trajectory_params(const TrajectoryParams& p) {
    if (p.n_bundles < 4) {
        throw std::invalid_argument("trajectory needs at least 4 bundles");
    }
    if (!(p.r0_deg > 0.0) || !(p.r_max_deg > p.r0_deg)) {
        throw std::invalid_argument("trajectory radii must satisfy 0 < r0 < r_max");
    }
    if (!(p.dr_deg > 0.0) || p.dr_deg > 1.0) {
        throw std::invalid_argument("trajectory step dr must be in (0, 1] degrees");
    }
    if (p.dr_deg > p.r_max_deg - p.r0_deg) {
        throw std::invalid_argument("trajectory step dr exceeds the radial span");
    }
    if (!(p.tau_deg > 0.0)) {
        throw std::invalid_argument("trajectory tau must be positive");
    }
    if (!(p.um_per_deg > 0.0)) {
        throw std::invalid_argument("um_per_deg must be positive");
    }
}

std::vector<AxonBundle> build_bundles(const TrajectoryParams& p) {
    validate_trajectory_params(p);
    const double deg2rad = std::numbers::pi / 180.0;
    const int n_steps = static_cast<int>(std::floor((p.r_max_deg - p.r0_deg) / p.dr_deg + 1e-9));
    std::vector<AxonBundle> bundles(p.n_bundles);
    for (uint32_t b = 0; b < p.n_bundles; ++b) {
        // Seed angles straddle but never hit the raphe at 0 / +-180 deg.
        const double phi0 = -180.0 + (b + 0.5) * 360.0 / p.n_bundles;
        const double phi_target = phi0 > 0.0 ? 180.0 : -180.0;
        AxonBundle& bundle = bundles[b];
        bundle.x_um.reserve(n_steps + 1);
        bundle.y_um.reserve(n_steps + 1);
        bundle.arc_um.reserve(n_steps + 1);
        double prev_x = 0.0, prev_y = 0.0, arc = 0.0;
        for (int k = 0; k <= n_steps; ++k) {
            const double r = p.r0_deg + k * p.dr_deg;
            const double phi = phi_target + (phi0 - phi_target) * std::exp(-(r - p.r0_deg) / p.tau_deg);
            const double x = p.um_per_deg * (p.optic_disc_deg.x_deg + r * std::cos(phi * deg2rad));
            const double y = p.um_per_deg * (p.optic_disc_deg.y_deg + r * std::sin(phi * deg2rad));
            if (k > 0) {
                arc += std::hypot(x - prev_x, y - prev_y);
            }
            bundle.x_um.push_back(static_cast<float>(x));
            bundle.y_um.push_back(static_cast<float>(y));
            bundle.arc_um.push_back(static_cast<float>(arc));
            prev_x = x;
            prev_y = y;
        }
    }
    return bundles;
}

SomaRef assign_soma(const RetinalPoint& p, const std::vector<AxonBundle>& bundles) {
    if (bundles.empty()) {
        throw std::invalid_argument("assign_soma: empty bundle list");
    }
    Candidate best;
    for (uint32_t b = 0; b < bundles.size(); ++b) {
        const AxonBundle& bundle = bundles[b];
        for (uint32_t v = 0; v < bundle.size(); ++v) {
            const double dx = p.x_um - bundle.x_um[v];
            const double dy = p.y_um - bundle.y_um[v];
            Candidate cand{dx * dx + dy * dy, {b, v}};
            if (cand.beats(best)) {
                best = cand;
            }
        }
    }
    if (!std::isfinite(best.dist_sq)) {
        throw std::invalid_argument("assign_soma: bundles have no vertices");
    }
    return best.soma;
}

VertexHash::VertexHash(const std::vector<AxonBundle>& bundles, double cell_um)
    : bundles_(bundles), cell_um_(cell_um) {
    double x_min = std::numeric_limits<double>::infinity();
    double y_min = std::numeric_limits<double>::infinity();
    double x_max = -std::numeric_limits<double>::infinity();
    double y_max = -std::numeric_limits<double>::infinity();
    size_t total = 0;
    for (const AxonBundle& b : bundles) {
        total += b.size();
        for (size_t v = 0; v < b.size(); ++v) {
            x_min = std::min(x_min, static_cast<double>(b.x_um[v]));
            x_max = std::max(x_max, static_cast<double>(b.x_um[v]));
            y_min = std::min(y_min, static_cast<double>(b.y_um[v]));
            y_max = std::max(y_max, static_cast<double>(b.y_um[v]));
        }
    }
    if (total == 0) {
        throw std::invalid_argument("vertex hash: bundles have no vertices");
    }
    x0_ = x_min;
    y0_ = y_min;
    nx_ = std::max(1, static_cast<int>((x_max - x_min) / cell_um_) + 1);
    ny_ = std::max(1, static_cast<int>((y_max - y_min) / cell_um_) + 1);

    auto cell_of = [&](float x, float y) {
        int cx = std::clamp(static_cast<int>((x - x0_) / cell_um_), 0, nx_ - 1);
        int cy = std::clamp(static_cast<int>((y - y0_) / cell_um_), 0, ny_ - 1);
        return static_cast<size_t>(cy) * nx_ + cx;
    };

    // CSR fill in bundle-major order keeps each cell's entries sorted by
    // (bundle, vertex), which the tie-break relies on.
    std::vector<uint32_t> counts(static_cast<size_t>(nx_) * ny_ + 1, 0);
    for (const AxonBundle& b : bundles_) {
        for (size_t v = 0; v < b.size(); ++v) {
            counts[cell_of(b.x_um[v], b.y_um[v]) + 1]++;
        }
    }
    for (size_t i = 1; i < counts.size(); ++i) {
        counts[i] += counts[i - 1];
    }
    cell_start_ = counts;
    entries_.resize(total);
    std::vector<uint32_t> fill(cell_start_.begin(), cell_start_.end() - 1);
    for (uint32_t bi = 0; bi < bundles_.size(); ++bi) {
        const AxonBundle& b = bundles_[bi];
        for (uint32_t v = 0; v < b.size(); ++v) {
            const size_t cell = cell_of(b.x_um[v], b.y_um[v]);
            entries_[fill[cell]++] = SomaRef{bi, v};
        }
    }
}

SomaRef VertexHash::nearest(const RetinalPoint& p) const {
    const int pcx = std::clamp(static_cast<int>(std::floor((p.x_um - x0_) / cell_um_)),
                               -1, nx_);
    const int pcy = std::clamp(static_cast<int>(std::floor((p.y_um - y0_) / cell_um_)),
                               -1, ny_);
    Candidate best;

    auto scan_cell = [&](int cx, int cy) {
        if (cx < 0 || cy < 0 || cx >= nx_ || cy >= ny_) return;
        // Point-to-cell AABB distance; equal distances must still be
        // scanned so a lower-id tie in a farther cell is not missed.
        const double bx0 = x0_ + cx * cell_um_;
        const double by0 = y0_ + cy * cell_um_;
        const double ddx = std::max({bx0 - p.x_um, 0.0, p.x_um - (bx0 + cell_um_)});
        const double ddy = std::max({by0 - p.y_um, 0.0, p.y_um - (by0 + cell_um_)});
        if (ddx * ddx + ddy * ddy > best.dist_sq) return;
        const size_t cell = static_cast<size_t>(cy) * nx_ + cx;
        for (uint32_t i = cell_start_[cell]; i < cell_start_[cell + 1]; ++i) {
            const SomaRef s = entries_[i];
            const double dx = p.x_um - bundles_[s.bundle].x_um[s.vertex];
            const double dy = p.y_um - bundles_[s.bundle].y_um[s.vertex];
            Candidate cand{dx * dx + dy * dy, s};
            if (cand.beats(best)) {
                best = cand;
            }
        }
    };

    const int max_ring = std::max({nx_, ny_, 2});
    for (int ring = 0; ring <= max_ring + 1; ++ring) {
        // Any cell in ring R is at least (R-1) cells away from p; once that
        // exceeds the best distance no farther ring can win or tie.
        if (std::isfinite(best.dist_sq) && ring >= 2) {
            const double lower = (ring - 1) * cell_um_;
            if (lower * lower > best.dist_sq) break;
        }
        if (ring == 0) {
            scan_cell(pcx, pcy);
            continue;
        }
        for (int cx = pcx - ring; cx <= pcx + ring; ++cx) {
            scan_cell(cx, pcy - ring);
            scan_cell(cx, pcy + ring);
        }
        for (int cy = pcy - ring + 1; cy <= pcy + ring - 1; ++cy) {
            scan_cell(pcx - ring, cy);
            scan_cell(pcx + ring, cy);
        }
    }
    return best.soma;
}

void AxonMap::finalize() {
    bundle_offset.assign(bundles.size() + 1, 0);
    size_t total = 0;
    for (size_t b = 0; b < bundles.size(); ++b) {
        bundle_offset[b] = static_cast<uint32_t>(total);
        total += bundles[b].size();
    }
    bundle_offset[bundles.size()] = static_cast<uint32_t>(total);
    flat_x.resize(total);
    flat_y.resize(total);
    flat_arc.resize(total);
    for (size_t b = 0; b < bundles.size(); ++b) {
        const AxonBundle& bundle = bundles[b];
        std::copy(bundle.x_um.begin(), bundle.x_um.end(), flat_x.begin() + bundle_offset[b]);
        std::copy(bundle.y_um.begin(), bundle.y_um.end(), flat_y.begin() + bundle_offset[b]);
        std::copy(bundle.arc_um.begin(), bundle.arc_um.end(), flat_arc.begin() + bundle_offset[b]);
    }
}

AxonMap build_axon_map(const RenderWindow& window, int rows, int cols,
                       const TrajectoryParams& params) {
    if (rows < 1 || cols < 1) {
        throw std::invalid_argument("axon map raster must be at least 1x1");
    }
    if (!(window.width_um() > 0.0) || !(window.height_um() > 0.0)) {
        throw std::invalid_argument("axon map window must have positive area");
    }
    AxonMap map;
    map.params = params;
    map.bundles = build_bundles(params);
    map.window = window;
    map.rows = static_cast<uint32_t>(rows);
    map.cols = static_cast<uint32_t>(cols);
    map.soma_of_pixel.resize(map.n_pixels());

    const double cell_um = std::max(140.0, params.dr_deg * params.um_per_deg);
    const VertexHash hash(map.bundles, cell_um);
#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const RetinalPoint p = pixel_center(window, rows, cols, r, c);
            map.soma_of_pixel[static_cast<size_t>(r) * cols + c] = hash.nearest(p);
        }
    }
    map.finalize();
    return map;
}

uint64_t axon_map_content_hash(const TrajectoryParams& params, const RenderWindow& window,
                               int rows, int cols) {
    std::vector<uint8_t> buf;
    append_params_block(buf, params);
    append_window_dims(buf, window, static_cast<uint32_t>(rows), static_cast<uint32_t>(cols));
    return detail::fnv1a64(buf.data(), buf.size());
}

void save_axon_map(const AxonMap& map, const std::string& path) {
    std::vector<uint8_t> buf;
    buf.insert(buf.end(), kAxmpMagic, kAxmpMagic + 4);
    detail::put_u32(buf, kAxmpVersion);
    detail::put_u64(buf, axon_map_content_hash(map.params, map.window, map.rows, map.cols));
    append_params_block(buf, map.params);
    detail::put_u32(buf, static_cast<uint32_t>(map.bundles.size()));
    for (const AxonBundle& b : map.bundles) {
        detail::put_u32(buf, static_cast<uint32_t>(b.size()));
        for (size_t v = 0; v < b.size(); ++v) {
            detail::put_f32(buf, b.x_um[v]);
            detail::put_f32(buf, b.y_um[v]);
            detail::put_f32(buf, b.arc_um[v]);
        }
    }
    append_window_dims(buf, map.window, map.rows, map.cols);
    for (const SomaRef& s : map.soma_of_pixel) {
        detail::put_u32(buf, s.bundle);
        detail::put_u32(buf, s.vertex);
    }
    detail::write_file_bytes(path, buf);
}

AxonMap load_axon_map(const std::string& path) {
    const std::vector<uint8_t> bytes = detail::read_file_bytes(path);
    detail::Reader rd(bytes.data(), bytes.size(), "axon map cache '" + path + "'");

    uint8_t magic[4];
    rd.read_bytes(magic, 4);
    if (std::memcmp(magic, kAxmpMagic, 4) != 0) {
        throw BadMagicError("'" + path + "' is not an axon map cache");
    }
    const uint32_t version = rd.u32();
    if (version != kAxmpVersion) {
        throw BadVersionError("axon map cache '" + path + "' has unsupported version " +
                              std::to_string(version));
    }
    const uint64_t stored_hash = rd.u64();

    AxonMap map;
    map.params.n_bundles = rd.u32();
    map.params.r0_deg = rd.f64();
    map.params.r_max_deg = rd.f64();
    map.params.dr_deg = rd.f64();
    map.params.tau_deg = rd.f64();
    map.params.optic_disc_deg.x_deg = rd.f64();
    map.params.optic_disc_deg.y_deg = rd.f64();
    map.params.um_per_deg = rd.f64();

    const uint32_t n_bundles = rd.u32();
    if (n_bundles != map.params.n_bundles) {
        throw CorruptFileError("axon map cache '" + path + "': bundle count disagrees with params");
    }
    map.bundles.resize(n_bundles);
    for (AxonBundle& b : map.bundles) {
        const uint32_t n_verts = rd.u32();
        rd.need(static_cast<size_t>(n_verts) * 12);
        b.x_um.resize(n_verts);
        b.y_um.resize(n_verts);
        b.arc_um.resize(n_verts);
        for (uint32_t v = 0; v < n_verts; ++v) {
            b.x_um[v] = rd.f32();
            b.y_um[v] = rd.f32();
            b.arc_um[v] = rd.f32();
        }
    }

    map.window.x_min_um = rd.f64();
    map.window.x_max_um = rd.f64();
    map.window.y_min_um = rd.f64();
    map.window.y_max_um = rd.f64();
    map.rows = rd.u32();
    map.cols = rd.u32();
    rd.need(map.n_pixels() * 8);
    map.soma_of_pixel.resize(map.n_pixels());
    for (SomaRef& s : map.soma_of_pixel) {
        s.bundle = rd.u32();
        s.vertex = rd.u32();
        if (s.bundle >= map.bundles.size() || s.vertex >= map.bundles[s.bundle].size()) {
            throw CorruptFileError("axon map cache '" + path + "': soma reference out of range");
        }
    }

    const uint64_t computed = axon_map_content_hash(map.params, map.window, map.rows, map.cols);
    if (computed != stored_hash) {
        throw CorruptFileError("axon map cache '" + path + "': header hash does not match content");
    }
    map.finalize();
    return map;
}

AxonMap load_axon_map_checked(const std::string& path, const TrajectoryParams& params,
                              const RenderWindow& window, int rows, int cols) {
    AxonMap map = load_axon_map(path);
    const uint64_t expected = axon_map_content_hash(params, window, rows, cols);
    const uint64_t actual = axon_map_content_hash(map.params, map.window, map.rows, map.cols);
    if (expected != actual) {
        throw StaleCacheError("axon map cache '" + path +
                              "' is stale: built for different parameters");
    }
    return map;
}

bool axon_maps_equal(const AxonMap& a, const AxonMap& b) {
    if (!(a.params == b.params) || !(a.window == b.window) || a.rows != b.rows ||
        a.cols != b.cols || a.bundles.size() != b.bundles.size() ||
        a.soma_of_pixel != b.soma_of_pixel) {
        return false;
    }
    for (size_t i = 0; i < a.bundles.size(); ++i) {
        if (a.bundles[i].x_um != b.bundles[i].x_um || a.bundles[i].y_um != b.bundles[i].y_um ||
            a.bundles[i].arc_um != b.bundles[i].arc_um) {
            return false;
        }
    }
    return true;
}

}  // namespace fixsim
