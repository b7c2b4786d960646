#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fixsim/image.hpp"

namespace fixsim {

// Square patch tiling of a square image. Defaults: 224 px image, 14 px
// patches, 16 x 16 = 256 patches.
struct PatchGrid {
    int image_px = 224;
    int patch_px = 14;

    int grid_side() const { return image_px / patch_px; }
    int n_patches() const { return grid_side() * grid_side(); }
};

// Throws when patch_px does not divide image_px exactly.
PatchGrid make_patch_grid(int image_px, int patch_px);

// One finite score per patch, row-major over the patch grid.
using SaliencyMap = std::vector<double>;

// Selected patch indices in descending-score order (ties toward the lower
// index), with their scores.
struct FixationSet {
    std::vector<int> selected;
    std::vector<double> scores;
    double ratio = 0.0;
};

// Row-major little-endian f32 tensor with dims, stored as:
//   magic "ATNF" | u32 version = 1 | u32 rank | rank x u32 dims | f32 payload
struct Tensor {
    std::vector<uint32_t> dims;
    std::vector<float> data;

    size_t n_elements() const;
};

void save_tensor(const Tensor& t, const std::string& path);

// Throws BadMagicError (not a tensor file), BadVersionError, or
// CorruptFileError (truncated payload / dim overflow).
Tensor load_tensor(const std::string& path);

// Sums per-patch attention over heads: att has shape [heads, n_patches].
SaliencyMap reduce_attention(const Tensor& att, const PatchGrid& grid);

// Keeps the floor(ratio * n_patches) highest-scoring patches. Throws
// InvalidRatioError for ratio outside (0, 1] and EmptySelectionError when
// the floor comes out as zero.
FixationSet select_fixations(const SaliencyMap& sal, double ratio, const PatchGrid& grid);

// Zeroes every pixel outside the selected patches; selected pixels pass
// through bit-exactly.
Image mask_image(const Image& img, const FixationSet& fix, const PatchGrid& grid);

// The row-major idx-th patch_px x patch_px block.
Image extract_patch(const Image& img, int idx, const PatchGrid& grid);

// Writes a patch-sized block into img at patch idx's footprint.
void insert_patch(Image& img, const Image& patch, int idx, const PatchGrid& grid);

// Attention-free saliency: per-patch mean of the 3x3 Sobel gradient
// magnitude (replicate padding at the borders).
SaliencyMap proxy_saliency(const Image& img, const PatchGrid& grid);

}  // namespace fixsim
