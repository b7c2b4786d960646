// Compares the OpenMP percept engine against the serial brute-force
// reference on a mid-sized scene, plus the engine at one thread to show the
// parallel speedup separately from the algorithmic one.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "fixsim/axon_map.hpp"
#include "fixsim/implant.hpp"
#include "fixsim/percept.hpp"
#include "fixsim/rng.hpp"

namespace {

using namespace fixsim;

struct Scene {
    ElectrodeGrid grid = build_grid(14, 14, 400.0, {0.0, 0.0});
    Stimulus stim;
    AxonMap map;

    explicit Scene(int render_px) {
        SplitMix64 rng(9001);
        stim.amplitudes.resize(grid.size());
        for (double& a : stim.amplitudes) {
            a = rng.next_double() < 0.3 ? 0.0 : rng.next_double();
        }
        TrajectoryParams params;
        params.n_bundles = 200;
        params.r_max_deg = 30.0;
        params.dr_deg = 0.5;
        map = build_axon_map(percept_window(grid, 3.0 * kPresetB.rho_um), render_px, render_px,
                             params);
    }
};

const Scene& scene64() {
    static Scene s(64);
    return s;
}

void BM_axon_engine_parallel(benchmark::State& state) {
    const Scene& s = scene64();
    omp_set_num_threads(omp_get_num_procs());
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_percept_axon(s.stim, s.grid, s.map, kPresetB));
    }
}
BENCHMARK(BM_axon_engine_parallel)->Unit(benchmark::kMillisecond);

void BM_axon_engine_single_thread(benchmark::State& state) {
    const Scene& s = scene64();
    omp_set_num_threads(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_percept_axon(s.stim, s.grid, s.map, kPresetB));
    }
    omp_set_num_threads(omp_get_num_procs());
}
BENCHMARK(BM_axon_engine_single_thread)->Unit(benchmark::kMillisecond);

void BM_axon_reference_serial(benchmark::State& state) {
    const Scene& s = scene64();
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_percept_reference(s.stim, s.grid, s.map, kPresetB));
    }
}
BENCHMARK(BM_axon_reference_serial)->Unit(benchmark::kMillisecond);

void BM_scoreboard(benchmark::State& state) {
    const Scene& s = scene64();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            compute_percept_scoreboard(s.stim, s.grid, s.map.window, 64, 64, kPresetB.rho_um));
    }
}
BENCHMARK(BM_scoreboard)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
