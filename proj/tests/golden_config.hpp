#pragma once

// Fixture configuration shared by the golden-file generator and the tests
// that compare against the stored rasters. Deliberately coarse so the
// brute-force reference engine stays fast.

#include "fixsim/axon_map.hpp"
#include "fixsim/dataset.hpp"
#include "fixsim/encoding.hpp"
#include "fixsim/implant.hpp"
#include "fixsim/percept.hpp"

namespace fixsim::testutil {

inline constexpr uint64_t kGoldenSeed = 909;
inline constexpr int kGoldenRenderPx = 56;  // divisible by the 14 px patch

inline TrajectoryParams golden_trajectory() {
    TrajectoryParams p;
    p.n_bundles = 64;
    p.r0_deg = 2.0;
    p.r_max_deg = 25.0;
    p.dr_deg = 1.0;
    p.tau_deg = 45.0;
    return p;
}

inline ElectrodeGrid golden_grid() {
    return build_grid(14, 14, 400.0, {0.0, 0.0});
}

inline AxonMap golden_map(const DecayParams& decay) {
    const RenderWindow window = percept_window(golden_grid(), 3.0 * decay.rho_um);
    return build_axon_map(window, kGoldenRenderPx, kGoldenRenderPx, golden_trajectory());
}

// Fixture images: one synthetic sample per class; the ring feeds the
// fixation golden, the triangle the downsampling golden.
inline Image golden_fixation_image() {
    return generate_synthetic_dataset(1, kGoldenSeed)[1].image;
}

inline Image golden_downsampling_image() {
    return generate_synthetic_dataset(1, kGoldenSeed)[4].image;
}

// Engine options for golden comparisons: a wider prune radius keeps the
// pruning tail (bounded by electrodes * exp(-sigma^2/2)) far below the
// 1e-6 comparison tolerance.
inline PipelineOptions golden_opts() {
    PipelineOptions opts;
    opts.prune_sigma = 8.0;
    return opts;
}

// Normalized (pre-quantization) canvas values as a rank-2 tensor.
inline Tensor normalized_tensor(const PerceptFrame& frame) {
    Tensor t;
    t.dims = {static_cast<uint32_t>(frame.rows), static_cast<uint32_t>(frame.cols)};
    t.data.resize(frame.intensities.size());
    for (size_t i = 0; i < frame.intensities.size(); ++i) {
        t.data[i] = frame.raw_max > 0.0
                        ? static_cast<float>(frame.intensities[i] / frame.raw_max)
                        : 0.0f;
    }
    return t;
}

}  // namespace fixsim::testutil
