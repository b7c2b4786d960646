#include "fixsim/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fixsim {

void validate_encoder(const EncoderSpec& spec) {
    if (spec.kind == EncoderSpec::Kind::gamma) {
        if (!(spec.gamma > 0.0) || !(spec.gain > 0.0)) {
            throw std::invalid_argument("gamma encoder needs positive gamma and gain");
        }
    }
}

Image apply_encoder(const Image& patch, const EncoderSpec& spec) {
    validate_encoder(spec);
    if (spec.kind == EncoderSpec::Kind::identity) {
        return patch;
    }
    Image out = patch;
    for (float& v : out.px) {
        v = static_cast<float>(
            std::clamp(spec.gain * std::pow(static_cast<double>(v), spec.gamma), 0.0, 1.0));
    }
    return out;
}

namespace {

PerceptFrame compute_percept(const Stimulus& stim, const ElectrodeGrid& grid, const AxonMap& map,
                             const DecayParams& decay, const PipelineOptions& opts) {
    if (opts.use_reference_engine) {
        return compute_percept_reference(stim, grid, map, decay);
    }
    return compute_percept_axon(stim, grid, map, decay, opts.prune_sigma);
}

bool all_zero(const Image& img) {
    return std::all_of(img.px.begin(), img.px.end(), [](float v) { return v == 0.0f; });
}

}  // namespace

FixationPipelineResult run_fixation_pipeline(const Image& img, const SaliencyMap& sal,
                                             double ratio, const EncoderSpec& enc,
                                             const PatchGrid& patch_grid,
                                             const ElectrodeGrid& grid, const AxonMap& map,
                                             const DecayParams& decay,
                                             const PipelineOptions& opts) {
    if (img.rows != patch_grid.image_px || img.cols != patch_grid.image_px) {
        throw std::invalid_argument("image dims do not match the patch grid");
    }
    if (grid.rows != patch_grid.patch_px || grid.cols != patch_grid.patch_px) {
        throw std::invalid_argument("electrode grid must match the patch size");
    }
    if (map.rows % patch_grid.patch_px != 0 || map.rows != map.cols) {
        throw std::invalid_argument(
            "fixation percepts need a square render divisible by the patch size");
    }

    FixationPipelineResult result;
    result.fixations = select_fixations(sal, ratio, patch_grid);
    result.canvas.rows = img.rows;
    result.canvas.cols = img.cols;
    result.canvas.intensities.assign(img.size(), 0.0);
    // Pixel-space extent; the canvas lives in image coordinates, not on the
    // retina.
    result.canvas.window =
        RenderWindow{0.0, static_cast<double>(img.cols), 0.0, static_cast<double>(img.rows)};

    const int ps = patch_grid.patch_px;
    const int side = patch_grid.grid_side();
    for (int idx : result.fixations.selected) {
        const Image patch = extract_patch(img, idx, patch_grid);
        const Image encoded = apply_encoder(patch, enc);
        if (all_zero(encoded)) {
            continue;  // zero stimulus, identically zero percept
        }
        const Stimulus stim = stimulus_from_image(encoded, grid);
        const PerceptFrame percept = compute_percept(stim, grid, map, decay, opts);

        // Box-average the full-array percept down to the patch footprint.
        const int block = percept.rows / ps;
        const int pr = (idx / side) * ps;
        const int pc = (idx % side) * ps;
        for (int r = 0; r < ps; ++r) {
            for (int c = 0; c < ps; ++c) {
                double sum = 0.0;
                for (int i = 0; i < block; ++i) {
                    for (int j = 0; j < block; ++j) {
                        sum += percept.at(r * block + i, c * block + j);
                    }
                }
                result.canvas.intensities[static_cast<size_t>(pr + r) * img.cols + (pc + c)] =
                    sum / (block * block);
            }
        }
    }
    double m = 0.0;
    for (double v : result.canvas.intensities) {
        m = std::max(m, v);
    }
    result.canvas.raw_max = m;
    return result;
}

PerceptFrame run_downsampling_pipeline(const Image& img, const EncoderSpec& enc,
                                       const ElectrodeGrid& grid, const AxonMap& map,
                                       const DecayParams& decay, const PipelineOptions& opts) {
    const Image small = resize_bilinear(img, grid.rows, grid.cols);
    const Image encoded = apply_encoder(small, enc);
    const Stimulus stim = stimulus_from_image(encoded, grid);
    return compute_percept(stim, grid, map, decay, opts);
}

}  // namespace fixsim
