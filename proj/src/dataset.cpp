#include "fixsim/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fixsim/errors.hpp"
#include "fixsim/rng.hpp"

namespace fixsim {

namespace {

// Unit direction from a half-angle tangent t: (cos, sin) built from
// rational arithmetic (plus IEEE-exact sqrt elsewhere), so rasterization is
// bit-identical on every conforming platform.
struct Rotation {
    double c = 1.0;
    double s = 0.0;

    static Rotation from_half_angle(double t) {
        const double d = 1.0 + t * t;
        return {(1.0 - t * t) / d, 2.0 * t / d};
    }

    Rotation compose(const Rotation& o) const {
        return {c * o.c - s * o.s, s * o.c + c * o.s};
    }

    // Rotate (u, v) into the shape frame.
    void apply(double u, double v, double& ru, double& rv) const {
        ru = c * u + s * v;
        rv = -s * u + c * v;
    }
};

struct ShapeParams {
    double cx = 0.0, cy = 0.0;  // pixel coordinates of the shape center
    double radius = 0.0;        // half of the overall extent
    Rotation rot;
};

bool inside_shape(int label, double u, double v, const ShapeParams& sp) {
    const double R = sp.radius;
    double ru, rv;
    sp.rot.apply(u, v, ru, rv);
    const double d2 = u * u + v * v;
    switch (static_cast<ShapeClass>(label)) {
        case ShapeClass::disk:
            return d2 <= R * R;
        case ShapeClass::ring: {
            const double inner = 0.70 * R;
            return d2 <= R * R && d2 >= inner * inner;
        }
        case ShapeClass::filled_square: {
            const double a = R * std::sqrt(0.5);
            return std::max(std::abs(ru), std::abs(rv)) <= a;
        }
        case ShapeClass::square_outline: {
            const double a = R * std::sqrt(0.5);
            const double m = std::max(std::abs(ru), std::abs(rv));
            return m <= a && m >= 0.72 * a;
        }
        case ShapeClass::triangle: {
            // Equilateral with circumradius R: inside iff the projection on
            // each vertex direction stays above -R/2.
            const double h = std::sqrt(3.0) / 2.0;
            const double p0 = ru;
            const double p1 = -0.5 * ru + h * rv;
            const double p2 = -0.5 * ru - h * rv;
            return p0 >= -0.5 * R && p1 >= -0.5 * R && p2 >= -0.5 * R;
        }
        case ShapeClass::plus_cross: {
            const double w = 0.16 * R;
            return (std::abs(ru) <= w && std::abs(rv) <= R) ||
                   (std::abs(rv) <= w && std::abs(ru) <= R);
        }
        case ShapeClass::x_cross: {
            const double q = std::sqrt(0.5);
            double xu, xv;
            Rotation diag{q, q};
            diag.apply(ru, rv, xu, xv);
            const double w = 0.16 * R;
            return (std::abs(xu) <= w && std::abs(xv) <= R) ||
                   (std::abs(xv) <= w && std::abs(xu) <= R);
        }
        case ShapeClass::horizontal_bar: {
            const double w = 0.14 * R;
            return std::abs(v) <= w && std::abs(u) <= R;
        }
        case ShapeClass::vertical_bar: {
            const double w = 0.14 * R;
            return std::abs(u) <= w && std::abs(v) <= R;
        }
        case ShapeClass::two_blob: {
            const double br = 0.42 * R;
            const double off = 0.58 * R;
            const double ax = off * sp.rot.c, ay = off * sp.rot.s;
            const double da = (u - ax) * (u - ax) + (v - ay) * (v - ay);
            const double db = (u + ax) * (u + ax) + (v + ay) * (v + ay);
            return da <= br * br || db <= br * br;
        }
    }
    return false;
}

// Orientation randomization only where it does not define the class: bars
// stay axis-aligned, disks and rings are isotropic anyway, and plus/x get
// only a small jitter so they stay distinct from each other.
double rotation_half_angle(int label, double unit) {
    switch (static_cast<ShapeClass>(label)) {
        case ShapeClass::filled_square:
        case ShapeClass::square_outline:
        case ShapeClass::triangle:
        case ShapeClass::two_blob:
            return unit * 2.0 - 1.0;  // ~ +-90 degrees
        case ShapeClass::plus_cross:
        case ShapeClass::x_cross:
            return (unit * 2.0 - 1.0) * 0.07;  // ~ +-8 degrees
        default:
            return 0.0;
    }
}

}  // namespace

const char* shape_class_name(int label) {
    static const char* names[kNumClasses] = {
        "disk",     "ring",    "filled_square", "square_outline", "triangle",
        "plus_cross", "x_cross", "horizontal_bar", "vertical_bar",   "two_blob"};
    if (label < 0 || label >= kNumClasses) {
        throw std::out_of_range("shape class label out of range");
    }
    return names[label];
}

std::vector<LabeledImage> generate_synthetic_dataset(int n_per_class, uint64_t seed,
                                                     int image_px) {
    if (n_per_class < 1) {
        throw std::invalid_argument("n_per_class must be at least 1");
    }
    const uint64_t dataset_seed = derive_seed(seed, kStreamDataset);
    std::vector<LabeledImage> out;
    out.reserve(static_cast<size_t>(n_per_class) * kNumClasses);
    int index = 0;
    for (int label = 0; label < kNumClasses; ++label) {
        for (int k = 0; k < n_per_class; ++k, ++index) {
            SplitMix64 rng(derive_seed(dataset_seed, static_cast<uint64_t>(index)));
            ShapeParams sp;
            // Center within the central 50% of the image.
            sp.cx = rng.next_range(0.25 * image_px, 0.75 * image_px);
            sp.cy = rng.next_range(0.25 * image_px, 0.75 * image_px);
            sp.radius = 0.5 * rng.next_range(40.0, 90.0);
            sp.rot = Rotation::from_half_angle(rotation_half_angle(label, rng.next_double()));

            LabeledImage li;
            char id[16];
            std::snprintf(id, sizeof(id), "%05d", index);
            li.id = id;
            li.label = label;
            li.image = Image::zeros(image_px, image_px);
            for (int r = 0; r < image_px; ++r) {
                for (int c = 0; c < image_px; ++c) {
                    const double u = (c + 0.5) - sp.cx;
                    const double v = (r + 0.5) - sp.cy;
                    if (inside_shape(label, u, v, sp)) {
                        li.image.at(r, c) = 1.0f;
                    }
                }
            }
            out.push_back(std::move(li));
        }
    }
    return out;
}

void write_dataset(const std::vector<LabeledImage>& data, const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream labels(dir + "/labels.csv");
    if (!labels) {
        throw IoError("cannot write '" + dir + "/labels.csv'");
    }
    labels << "id,label,filename\n";
    for (const LabeledImage& li : data) {
        const std::string filename = "img_" + li.id + "_c" + std::to_string(li.label) + ".png";
        write_image_png(dir + "/" + filename, quantize_u8(li.image));
        labels << li.id << "," << li.label << "," << filename << "\n";
    }
}

std::vector<LabeledImage> load_dataset(const std::string& dir) {
    std::ifstream labels(dir + "/labels.csv");
    if (!labels) {
        throw IoError("cannot read '" + dir + "/labels.csv'");
    }
    std::vector<LabeledImage> out;
    std::string line;
    std::getline(labels, line);  // header
    while (std::getline(labels, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        LabeledImage li;
        std::string label_str, filename;
        if (!std::getline(row, li.id, ',') || !std::getline(row, label_str, ',') ||
            !std::getline(row, filename)) {
            throw FormatError("malformed labels.csv row: '" + line + "'");
        }
        li.label = std::stoi(label_str);
        if (li.label < 0 || li.label >= kNumClasses) {
            throw FormatError("labels.csv label out of range: '" + line + "'");
        }
        li.image = read_image_png(dir + "/" + filename);
        out.push_back(std::move(li));
    }
    if (out.empty()) {
        throw FormatError("labels.csv lists no images in '" + dir + "'");
    }
    return out;
}

}  // namespace fixsim
