#pragma once

// Randomized small percept scenarios shared by the unit suite and the
// acceptance runner: a few electrodes, a modest axon map, random amplitudes.

#include "fixsim/axon_map.hpp"
#include "fixsim/implant.hpp"
#include "fixsim/percept.hpp"
#include "fixsim/rng.hpp"

namespace fixsim::testutil {

struct PerceptScenario {
    ElectrodeGrid grid;
    Stimulus stim;
    AxonMap map;
};

inline PerceptScenario random_percept_scenario(SplitMix64& rng, int max_side = 32,
                                               int max_electrode_side = 3,
                                               uint32_t max_bundles = 50) {
    PerceptScenario sc;
    const int er = 1 + static_cast<int>(rng.next_below(max_electrode_side));
    const int ec = 1 + static_cast<int>(rng.next_below(max_electrode_side));
    const double spacing = rng.next_range(200.0, 600.0);
    const RetinalPoint center{rng.next_range(-1500.0, 1500.0), rng.next_range(-1500.0, 1500.0)};
    sc.grid = build_grid(er, ec, spacing, center);

    sc.stim.amplitudes.resize(sc.grid.size());
    for (double& a : sc.stim.amplitudes) {
        a = rng.next_double() < 0.2 ? 0.0 : rng.next_double();
    }

    TrajectoryParams p;
    p.n_bundles = 4 + static_cast<uint32_t>(rng.next_below(max_bundles - 3));
    p.r0_deg = rng.next_range(1.0, 5.0);
    p.r_max_deg = rng.next_range(8.0, 25.0);
    p.dr_deg = rng.next_range(0.2, 1.0);
    p.tau_deg = rng.next_range(30.0, 90.0);

    const double half = rng.next_range(1000.0, 4000.0);
    const RenderWindow w{center.x_um - half, center.x_um + half, center.y_um - half,
                         center.y_um + half};
    const int rows = 1 + static_cast<int>(rng.next_below(max_side));
    const int cols = 1 + static_cast<int>(rng.next_below(max_side));
    sc.map = build_axon_map(w, rows, cols, p);
    return sc;
}

// Hand-assembled single-bundle map for analytic cases.
inline AxonMap manual_map(std::vector<AxonBundle> bundles, const RenderWindow& window, int rows,
                          int cols, std::vector<SomaRef> soma) {
    AxonMap map;
    map.params.n_bundles = static_cast<uint32_t>(bundles.size());
    map.bundles = std::move(bundles);
    map.window = window;
    map.rows = static_cast<uint32_t>(rows);
    map.cols = static_cast<uint32_t>(cols);
    map.soma_of_pixel = std::move(soma);
    map.finalize();
    return map;
}

}  // namespace fixsim::testutil
