#include "fixsim/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "fixsim/errors.hpp"

namespace fixsim {

Image read_image_png(const std::string& path) {
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&png, path.c_str())) {
        const std::string msg = png.message;
        png_image_free(&png);
        throw IoError("cannot read PNG '" + path + "': " + msg);
    }
    // Always decode to RGB and reduce with our own luma weights so gray and
    // color inputs go through one documented conversion.
    png.format = PNG_FORMAT_RGB;
    std::vector<uint8_t> buf(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, buf.data(), 0, nullptr)) {
        const std::string msg = png.message;
        png_image_free(&png);
        throw IoError("cannot decode PNG '" + path + "': " + msg);
    }
    Image img = Image::zeros(static_cast<int>(png.height), static_cast<int>(png.width));
    for (size_t i = 0; i < img.size(); ++i) {
        const uint8_t r = buf[3 * i + 0];
        const uint8_t g = buf[3 * i + 1];
        const uint8_t b = buf[3 * i + 2];
        if (r == g && g == b) {
            // Gray inputs round-trip exactly.
            img.px[i] = static_cast<float>(r) / 255.0f;
        } else {
            const double luma = (0.299 * r + 0.587 * g + 0.114 * b) / 255.0;
            img.px[i] = static_cast<float>(std::clamp(luma, 0.0, 1.0));
        }
    }
    return img;
}

void write_image_png(const std::string& path, const ImageU8& img) {
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(img.cols);
    png.height = static_cast<png_uint_32>(img.rows);
    png.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&png, path.c_str(), 0, img.px.data(), 0, nullptr)) {
        const std::string msg = png.message;
        png_image_free(&png);
        throw IoError("cannot write PNG '" + path + "': " + msg);
    }
}

ImageU8 quantize_u8(const Image& img) {
    ImageU8 out{img.rows, img.cols, std::vector<uint8_t>(img.size())};
    for (size_t i = 0; i < img.size(); ++i) {
        double v = std::clamp(static_cast<double>(img.px[i]), 0.0, 1.0);
        out.px[i] = static_cast<uint8_t>(std::round(v * 255.0));
    }
    return out;
}

Image resize_bilinear(const Image& src, int out_rows, int out_cols) {
    if (src.rows < 1 || src.cols < 1 || out_rows < 1 || out_cols < 1) {
        throw std::invalid_argument("resize_bilinear: empty raster");
    }
    Image out = Image::zeros(out_rows, out_cols);
    const double sy = static_cast<double>(src.rows) / out_rows;
    const double sx = static_cast<double>(src.cols) / out_cols;
    for (int r = 0; r < out_rows; ++r) {
        const double in_y = (r + 0.5) * sy - 0.5;
        const double fy = std::floor(in_y);
        const int y0 = std::clamp(static_cast<int>(fy), 0, src.rows - 1);
        const int y1 = std::min(y0 + 1, src.rows - 1);
        const double wy = std::clamp(in_y - fy, 0.0, 1.0);
        for (int c = 0; c < out_cols; ++c) {
            const double in_x = (c + 0.5) * sx - 0.5;
            const double fx = std::floor(in_x);
            const int x0 = std::clamp(static_cast<int>(fx), 0, src.cols - 1);
            const int x1 = std::min(x0 + 1, src.cols - 1);
            const double wx = std::clamp(in_x - fx, 0.0, 1.0);
            const double top = (1.0 - wx) * src.at(y0, x0) + wx * src.at(y0, x1);
            const double bot = (1.0 - wx) * src.at(y1, x0) + wx * src.at(y1, x1);
            out.at(r, c) = static_cast<float>((1.0 - wy) * top + wy * bot);
        }
    }
    return out;
}

Image downscale_box(const Image& src, int out_rows, int out_cols) {
    if (out_rows < 1 || out_cols < 1 || src.rows % out_rows != 0 || src.cols % out_cols != 0) {
        throw std::invalid_argument("downscale_box: output dims must divide source dims");
    }
    const int br = src.rows / out_rows;
    const int bc = src.cols / out_cols;
    Image out = Image::zeros(out_rows, out_cols);
    for (int r = 0; r < out_rows; ++r) {
        for (int c = 0; c < out_cols; ++c) {
            double sum = 0.0;
            for (int i = 0; i < br; ++i) {
                for (int j = 0; j < bc; ++j) {
                    sum += src.at(r * br + i, c * bc + j);
                }
            }
            out.at(r, c) = static_cast<float>(sum / (br * bc));
        }
    }
    return out;
}

}  // namespace fixsim
