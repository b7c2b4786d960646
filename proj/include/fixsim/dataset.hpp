#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fixsim/image.hpp"

namespace fixsim {

inline constexpr int kNumClasses = 10;

// Class ids, in label order.
enum class ShapeClass : int {
    disk = 0,
    ring = 1,
    filled_square = 2,
    square_outline = 3,
    triangle = 4,
    plus_cross = 5,
    x_cross = 6,
    horizontal_bar = 7,
    vertical_bar = 8,
    two_blob = 9,
};

const char* shape_class_name(int label);

struct LabeledImage {
    std::string id;  // zero-padded dataset index
    int label = 0;
    Image image;
};

// White-on-black 224 x 224 shapes, n_per_class of each of the 10 classes in
// class-major order. Centers land in the central 50% of the image, sizes in
// [40, 90] px; orientation is randomized where it does not define the class
// (rotations are built from algebraic half-angle tangents rather than libm
// trig, keeping output bit-identical across platforms). Fully determined by
// the seed.
std::vector<LabeledImage> generate_synthetic_dataset(int n_per_class, uint64_t seed,
                                                     int image_px = 224);

// Writes images as PNG plus a labels.csv (id,label,filename) into dir.
void write_dataset(const std::vector<LabeledImage>& data, const std::string& dir);

// Loads a dataset written by write_dataset (or any dir with the same
// labels.csv convention).
std::vector<LabeledImage> load_dataset(const std::string& dir);

}  // namespace fixsim
