#include "fixsim/percept.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fixsim/fixation.hpp"

namespace fixsim {

namespace {

void validate_percept_inputs(const Stimulus& stim, const ElectrodeGrid& grid,
                             const DecayParams& decay) {
    if (static_cast<int>(stim.amplitudes.size()) != grid.size()) {
        throw std::invalid_argument("stimulus has " + std::to_string(stim.amplitudes.size()) +
                                    " amplitudes for a grid of " + std::to_string(grid.size()) +
                                    " electrodes");
    }
    if (!(decay.rho_um > 0.0) || !(decay.lambda_um > 0.0)) {
        throw std::invalid_argument("decay constants rho and lambda must be positive");
    }
}

PerceptFrame empty_frame(int rows, int cols, const RenderWindow& window) {
    PerceptFrame frame;
    frame.rows = rows;
    frame.cols = cols;
    frame.window = window;
    frame.intensities.assign(static_cast<size_t>(rows) * cols, 0.0);
    frame.raw_max = 0.0;
    return frame;
}

void set_raw_max(PerceptFrame& frame) {
    double m = 0.0;
    for (double v : frame.intensities) {
        m = std::max(m, v);
    }
    frame.raw_max = m;
}

}  // namespace

PerceptFrame compute_percept_axon(const Stimulus& stim, const ElectrodeGrid& grid,
                                  const AxonMap& map, const DecayParams& decay,
                                  double prune_sigma) {
    validate_percept_inputs(stim, grid, decay);
    if (!(prune_sigma > 0.0)) {
        throw std::invalid_argument("prune_sigma must be positive");
    }
    const int rows = static_cast<int>(map.rows);
    const int cols = static_cast<int>(map.cols);
    PerceptFrame frame = empty_frame(rows, cols, map.window);

    std::vector<int> active;
    double amp_sum = 0.0;
    for (int e = 0; e < grid.size(); ++e) {
        amp_sum += stim.amplitudes[e];
        if (stim.amplitudes[e] != 0.0) {
            active.push_back(e);
        }
    }
    if (active.empty()) {
        return frame;
    }

    const double rho = decay.rho_um;
    const double lambda = decay.lambda_um;
    const double prune_r = prune_sigma * rho;
    const double prune_r2 = prune_r * prune_r;

    double ex_min = grid.positions[active[0]].x_um, ex_max = ex_min;
    double ey_min = grid.positions[active[0]].y_um, ey_max = ey_min;
    for (int e : active) {
        ex_min = std::min(ex_min, grid.positions[e].x_um);
        ex_max = std::max(ex_max, grid.positions[e].x_um);
        ey_min = std::min(ey_min, grid.positions[e].y_um);
        ey_max = std::max(ey_max, grid.positions[e].y_um);
    }

    // Radial field at every bundle vertex, summed over the active
    // electrodes in index order. Vertices beyond the prune radius of every
    // electrode contribute exactly zero.
    const size_t n_verts = map.flat_x.size();
    std::vector<double> field(n_verts, 0.0);
#pragma omp parallel for schedule(static)
    for (long v = 0; v < static_cast<long>(n_verts); ++v) {
        const double x = map.flat_x[v];
        const double y = map.flat_y[v];
        if (x < ex_min - prune_r || x > ex_max + prune_r || y < ey_min - prune_r ||
            y > ey_max + prune_r) {
            continue;
        }
        double s = 0.0;
        for (int e : active) {
            const double dx = x - grid.positions[e].x_um;
            const double dy = y - grid.positions[e].y_um;
            const double d2 = dx * dx + dy * dy;
            if (d2 <= prune_r2) {
                s += stim.amplitudes[e] * radial_decay(d2, rho);
            }
        }
        field[v] = s;
    }

    // Disc-ward running maximum of the field per bundle: while walking a
    // bundle toward the disc, no remaining term can exceed
    // axonal_decay(L) * prefix_max, which gives an exact stopping bound.
    std::vector<double> prefix_max(n_verts, 0.0);
    for (size_t b = 0; b < map.bundles.size(); ++b) {
        double running = 0.0;
        for (uint32_t off = map.bundle_offset[b]; off < map.bundle_offset[b + 1]; ++off) {
            running = std::max(running, field[off]);
            prefix_max[off] = running;
        }
    }

    // Arc distance beyond which axonal_decay(L) * amp_sum < kAxonalExitEps.
    double arc_cut = 0.0;
    if (amp_sum > kAxonalExitEps) {
        arc_cut = lambda * std::sqrt(2.0 * std::log(amp_sum / kAxonalExitEps));
    }

    const long n_px = static_cast<long>(frame.intensities.size());
#pragma omp parallel for schedule(static)
    for (long pix = 0; pix < n_px; ++pix) {
        const SomaRef soma = map.soma_of_pixel[pix];
        const uint32_t off = map.bundle_offset[soma.bundle];
        const double arc_i = map.flat_arc[off + soma.vertex];
        double best = 0.0;
        for (int j = static_cast<int>(soma.vertex); j >= 0; --j) {
            const double arc_len = arc_i - map.flat_arc[off + j];
            if (arc_len > arc_cut) break;
            const double ax = axonal_decay(arc_len, lambda);
            if (ax * prefix_max[off + j] <= best) break;
            best = std::max(best, ax * field[off + j]);
        }
        frame.intensities[pix] = best;
    }
    set_raw_max(frame);
    return frame;
}

PerceptFrame compute_percept_reference(const Stimulus& stim, const ElectrodeGrid& grid,
                                       const AxonMap& map, const DecayParams& decay) {
    validate_percept_inputs(stim, grid, decay);
    const int rows = static_cast<int>(map.rows);
    const int cols = static_cast<int>(map.cols);
    PerceptFrame frame = empty_frame(rows, cols, map.window);

    for (size_t pix = 0; pix < frame.intensities.size(); ++pix) {
        const SomaRef soma = map.soma_of_pixel[pix];
        const AxonBundle& bundle = map.bundles[soma.bundle];
        const double arc_i = bundle.arc_um[soma.vertex];
        double best = 0.0;
        for (uint32_t j = 0; j <= soma.vertex; ++j) {
            double s = 0.0;
            for (int e = 0; e < grid.size(); ++e) {
                const double dx = bundle.x_um[j] - grid.positions[e].x_um;
                const double dy = bundle.y_um[j] - grid.positions[e].y_um;
                s += stim.amplitudes[e] * radial_decay(dx * dx + dy * dy, decay.rho_um);
            }
            const double arc_len = arc_i - bundle.arc_um[j];
            best = std::max(best, axonal_decay(arc_len, decay.lambda_um) * s);
        }
        frame.intensities[pix] = best;
    }
    set_raw_max(frame);
    return frame;
}

PerceptFrame compute_percept_scoreboard(const Stimulus& stim, const ElectrodeGrid& grid,
                                        const RenderWindow& window, int rows, int cols,
                                        double rho_um) {
    if (static_cast<int>(stim.amplitudes.size()) != grid.size()) {
        throw std::invalid_argument("stimulus does not match the electrode grid");
    }
    if (!(rho_um > 0.0)) {
        throw std::invalid_argument("rho must be positive");
    }
    PerceptFrame frame = empty_frame(rows, cols, window);
#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const RetinalPoint p = pixel_center(window, rows, cols, r, c);
            double s = 0.0;
            for (int e = 0; e < grid.size(); ++e) {
                const double dx = p.x_um - grid.positions[e].x_um;
                const double dy = p.y_um - grid.positions[e].y_um;
                s += stim.amplitudes[e] * radial_decay(dx * dx + dy * dy, rho_um);
            }
            frame.intensities[static_cast<size_t>(r) * cols + c] = s;
        }
    }
    set_raw_max(frame);
    return frame;
}

ImageU8 render_percept(const PerceptFrame& frame, const RenderScale& scale) {
    Image normalized = Image::zeros(frame.rows, frame.cols);
    if (scale.global_max) {
        if (frame.raw_max > 0.0) {
            for (size_t i = 0; i < frame.intensities.size(); ++i) {
                normalized.px[i] = static_cast<float>(frame.intensities[i] / frame.raw_max);
            }
        }
    } else {
        if (!(scale.fixed_scale > 0.0)) {
            throw std::invalid_argument("fixed render scale must be positive");
        }
        for (size_t i = 0; i < frame.intensities.size(); ++i) {
            normalized.px[i] = static_cast<float>(
                std::clamp(frame.intensities[i] / scale.fixed_scale, 0.0, 1.0));
        }
    }
    return quantize_u8(normalized);
}

void save_percept_raw(const PerceptFrame& frame, const std::string& path) {
    Tensor t;
    t.dims = {static_cast<uint32_t>(frame.rows), static_cast<uint32_t>(frame.cols)};
    t.data.resize(frame.intensities.size());
    for (size_t i = 0; i < frame.intensities.size(); ++i) {
        t.data[i] = static_cast<float>(frame.intensities[i]);
    }
    save_tensor(t, path);
}

}  // namespace fixsim
