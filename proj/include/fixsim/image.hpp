#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fixsim {

// Grayscale raster with values in [0, 1], row-major.
struct Image {
    int rows = 0;
    int cols = 0;
    std::vector<float> px;

    static Image zeros(int rows, int cols) {
        return Image{rows, cols, std::vector<float>(static_cast<size_t>(rows) * cols, 0.0f)};
    }

    float at(int r, int c) const { return px[static_cast<size_t>(r) * cols + c]; }
    float& at(int r, int c) { return px[static_cast<size_t>(r) * cols + c]; }
    size_t size() const { return px.size(); }
};

// 8-bit grayscale raster, row-major.
struct ImageU8 {
    int rows = 0;
    int cols = 0;
    std::vector<uint8_t> px;
};

// Reads a PNG (grayscale or RGB). Color inputs are reduced with luma
// weights (0.299, 0.587, 0.114); 8-bit values map to v / 255.
Image read_image_png(const std::string& path);

void write_image_png(const std::string& path, const ImageU8& img);

// Quantizes [0, 1] floats to 0..255, rounding halves away from zero.
// Values outside [0, 1] are clamped first.
ImageU8 quantize_u8(const Image& img);

// Bilinear resize with the pixel-center convention (align_corners = false);
// samples outside the source are clamped to the edge. Constants are
// preserved exactly.
Image resize_bilinear(const Image& src, int out_rows, int out_cols);

// Exact block-mean downscale. Source dims must be integer multiples of the
// output dims.
Image downscale_box(const Image& src, int out_rows, int out_cols);

}  // namespace fixsim
