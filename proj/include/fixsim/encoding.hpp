#pragma once

#include <string>

#include "fixsim/fixation.hpp"
#include "fixsim/image.hpp"
#include "fixsim/percept.hpp"

namespace fixsim {

// Static stimulus encoders applied to patches before stimulation.
struct EncoderSpec {
    enum class Kind { identity, gamma };

    Kind kind = Kind::identity;
    double gamma = 2.0;  // gamma kind only
    double gain = 1.0;   // gamma kind only
};

void validate_encoder(const EncoderSpec& spec);

// identity: unchanged. gamma: clamp(gain * v^gamma, 0, 1) elementwise.
Image apply_encoder(const Image& patch, const EncoderSpec& spec);

struct PipelineOptions {
    double prune_sigma = kDefaultPruneSigma;
    // Route percepts through the serial brute-force engine instead of the
    // optimized one. Test/benchmark hook.
    bool use_reference_engine = false;
};

struct FixationPipelineResult {
    // Reassembled canvas at the input image's resolution; window holds the
    // pixel-space extent, raw_max the peak pre-normalization intensity.
    PerceptFrame canvas;
    FixationSet fixations;
};

// Fixation-based stimulation: every selected patch is extracted, encoded,
// presented to the full electrode array, rendered through the axon map
// model, box-averaged back down to patch size, and written into the canvas
// at its original footprint. Unselected patches stay black. The canvas is
// normalized once globally (at render time), never per patch, so relative
// brightness between fixations is preserved.
//
// map must render at a resolution divisible by grid_img.patch_px, and the
// electrode grid must match the patch size.
FixationPipelineResult run_fixation_pipeline(const Image& img, const SaliencyMap& sal,
                                             double ratio, const EncoderSpec& enc,
                                             const PatchGrid& patch_grid,
                                             const ElectrodeGrid& grid, const AxonMap& map,
                                             const DecayParams& decay,
                                             const PipelineOptions& opts = {});

// Downsampling-based stimulation: bilinear resize of the whole image to the
// electrode grid, encode, stimulate, render one percept over the full map.
PerceptFrame run_downsampling_pipeline(const Image& img, const EncoderSpec& enc,
                                       const ElectrodeGrid& grid, const AxonMap& map,
                                       const DecayParams& decay,
                                       const PipelineOptions& opts = {});

}  // namespace fixsim
