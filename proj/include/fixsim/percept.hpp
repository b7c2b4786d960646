#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fixsim/axon_map.hpp"
#include "fixsim/geometry.hpp"
#include "fixsim/image.hpp"
#include "fixsim/implant.hpp"

namespace fixsim {

struct DecayParams {
    double rho_um = 150.0;     // radial decay constant
    double lambda_um = 100.0;  // axonal decay constant
};

// Named parameter sets: A is the idealized case, B the subject-derived one.
inline constexpr DecayParams kPresetA{150.0, 100.0};
inline constexpr DecayParams kPresetB{437.0, 1420.0};

// Decay kernels. Both the optimized engine and the reference evaluate
// through these two functions, so swapping the family (e.g. to a plain
// exponential) changes every path consistently and keeps the oracle tests
// form-agnostic.
inline double radial_decay(double dist_sq_um, double rho_um) {
    return std::exp(-dist_sq_um / (2.0 * rho_um * rho_um));
}

inline double axonal_decay(double arc_um, double lambda_um) {
    return std::exp(-(arc_um * arc_um) / (2.0 * lambda_um * lambda_um));
}

// Axonal contributions below this absolute bound may be dropped by the
// optimized engine's early exit.
inline constexpr double kAxonalExitEps = 1e-7;

inline constexpr double kDefaultPruneSigma = 6.0;

// Nonnegative intensity raster produced by a percept computation.
// `window` is the retinal rectangle the raster spans (for reassembled
// fixation canvases it holds the pixel-space extent instead). `raw_max` is
// the peak intensity before any normalization.
struct PerceptFrame {
    int rows = 0;
    int cols = 0;
    std::vector<double> intensities;
    RenderWindow window;
    double raw_max = 0.0;

    double at(int r, int c) const { return intensities[static_cast<size_t>(r) * cols + c]; }
};

// Axon map percept: pixel p with soma (b, i) takes
//   I(p) = max_{j <= i} axonal_decay(arc[i]-arc[j], lambda)
//                       * sum_e amp_e * radial_decay(|pos_e - v_j|^2, rho)
// over the disc-ward vertices of its bundle. OpenMP-parallel over pixels;
// output is identical for every thread count. Electrode/vertex pairs
// farther apart than prune_sigma * rho are skipped, and the vertex walk
// stops once no remaining term can reach kAxonalExitEps * sum(amp) or beat
// the running maximum (exact bound). compute_percept_reference defines
// correctness.
PerceptFrame compute_percept_axon(const Stimulus& stim, const ElectrodeGrid& grid,
                                  const AxonMap& map, const DecayParams& decay,
                                  double prune_sigma = kDefaultPruneSigma);

// Serial brute-force evaluation of the same formula: no pruning, no early
// exit, straightforward nested loops. Ground truth for the engine.
PerceptFrame compute_percept_reference(const Stimulus& stim, const ElectrodeGrid& grid,
                                       const AxonMap& map, const DecayParams& decay);

// Radial-only percept (the lambda -> 0 limit of the axon map model):
//   I(p) = sum_e amp_e * radial_decay(|pos_e - p|^2, rho)
// at each pixel center.
PerceptFrame compute_percept_scoreboard(const Stimulus& stim, const ElectrodeGrid& grid,
                                        const RenderWindow& window, int rows, int cols,
                                        double rho_um);

struct RenderScale {
    // Divide by raw_max when global_max is true (an all-zero frame renders
    // all-black); otherwise divide by fixed_scale and clamp to [0, 1].
    bool global_max = true;
    double fixed_scale = 1.0;
};

ImageU8 render_percept(const PerceptFrame& frame, const RenderScale& scale = {});

// Raw frame dump in the ATNF tensor format, rank 2 [rows, cols].
void save_percept_raw(const PerceptFrame& frame, const std::string& path);

}  // namespace fixsim
