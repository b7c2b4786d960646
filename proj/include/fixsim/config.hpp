#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fixsim/axon_map.hpp"
#include "fixsim/encoding.hpp"
#include "fixsim/geometry.hpp"
#include "fixsim/percept.hpp"

namespace fixsim {

struct GridSpec {
    int rows = 14;
    int cols = 14;
    double spacing_um = 400.0;
    RetinalPoint center_um{0.0, 0.0};
};

struct DatasetSpec {
    int n_per_class = 50;
};

// Full run configuration. JSON schema is documented in the README; unknown
// keys are rejected so typos fail loudly.
struct RunConfig {
    double um_per_deg = kDefaultUmPerDeg;
    GridSpec grid;
    DecayParams decay = kPresetA;
    std::string decay_preset = "A";  // "A", "B", or "" for custom values
    TrajectoryParams trajectory;
    int fixation_render_px = 112;
    int full_render_px = 224;
    double prune_sigma = kDefaultPruneSigma;
    double ratio = 0.10;
    EncoderSpec encoder;
    DatasetSpec dataset;
    std::string image_dir;      // empty -> synthetic dataset
    std::string attention_dir;  // empty -> Sobel proxy saliency
    std::vector<std::string> variants{"fixation-identity", "downsampling-identity"};
    std::vector<double> ratio_sweep;  // empty -> no sweep
    std::string out_dir = "out";
    std::string cache_dir;  // empty -> <out_dir>/axon_cache
    uint64_t seed = 1;
    int threads = 0;  // 0 = library/environment default

    ElectrodeGrid make_grid() const;
    std::string effective_cache_dir() const;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config_json(const std::string& text);
std::string config_to_json(const RunConfig& config);

void validate_config(const RunConfig& config);

}  // namespace fixsim
