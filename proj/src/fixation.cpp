#include "fixsim/fixation.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

#include "binary_io.hpp"
#include "fixsim/errors.hpp"

namespace fixsim {

namespace {

constexpr uint32_t kAtnfVersion = 1;
constexpr char kAtnfMagic[4] = {'A', 'T', 'N', 'F'};

}  // namespace

PatchGrid make_patch_grid(int image_px, int patch_px) {
    if (image_px < 1 || patch_px < 1 || image_px % patch_px != 0) {
        throw std::invalid_argument("patch size must divide the image size exactly");
    }
    return PatchGrid{image_px, patch_px};
}

size_t Tensor::n_elements() const {
    size_t n = 1;
    for (uint32_t d : dims) {
        n *= d;
    }
    return dims.empty() ? 0 : n;
}

void save_tensor(const Tensor& t, const std::string& path) {
    if (t.data.size() != t.n_elements()) {
        throw std::invalid_argument("tensor payload does not match its dims");
    }
    std::vector<uint8_t> buf;
    buf.insert(buf.end(), kAtnfMagic, kAtnfMagic + 4);
    detail::put_u32(buf, kAtnfVersion);
    detail::put_u32(buf, static_cast<uint32_t>(t.dims.size()));
    for (uint32_t d : t.dims) {
        detail::put_u32(buf, d);
    }
    for (float v : t.data) {
        detail::put_f32(buf, v);
    }
    detail::write_file_bytes(path, buf);
}

Tensor load_tensor(const std::string& path) {
    const std::vector<uint8_t> bytes = detail::read_file_bytes(path);
    detail::Reader rd(bytes.data(), bytes.size(), "tensor file '" + path + "'");

    uint8_t magic[4];
    rd.read_bytes(magic, 4);
    if (std::memcmp(magic, kAtnfMagic, 4) != 0) {
        throw BadMagicError("'" + path + "' is not a tensor file");
    }
    const uint32_t version = rd.u32();
    if (version != kAtnfVersion) {
        throw BadVersionError("tensor file '" + path + "' has unsupported version " +
                              std::to_string(version));
    }
    Tensor t;
    const uint32_t rank = rd.u32();
    if (rank > 8) {
        throw CorruptFileError("tensor file '" + path + "': implausible rank " +
                               std::to_string(rank));
    }
    t.dims.resize(rank);
    size_t n = rank == 0 ? 0 : 1;
    for (uint32_t& d : t.dims) {
        d = rd.u32();
        if (d != 0 && n > rd.remaining() / d) {
            throw CorruptFileError("tensor file '" + path + "': truncated payload");
        }
        n *= d;
    }
    if (rd.remaining() / 4 < n) {
        throw CorruptFileError("tensor file '" + path + "': truncated payload");
    }
    t.data.resize(n);
    for (float& v : t.data) {
        v = rd.f32();
    }
    return t;
}

SaliencyMap reduce_attention(const Tensor& att, const PatchGrid& grid) {
    if (att.dims.size() != 2) {
        throw std::invalid_argument("attention tensor must have rank 2 [heads, n_patches]");
    }
    const size_t heads = att.dims[0];
    const size_t n_patches = att.dims[1];
    if (n_patches != static_cast<size_t>(grid.n_patches())) {
        throw std::invalid_argument("attention tensor has " + std::to_string(n_patches) +
                                    " patches but the grid has " +
                                    std::to_string(grid.n_patches()));
    }
    SaliencyMap scores(n_patches, 0.0);
    for (size_t h = 0; h < heads; ++h) {
        for (size_t p = 0; p < n_patches; ++p) {
            scores[p] += att.data[h * n_patches + p];
        }
    }
    return scores;
}

FixationSet select_fixations(const SaliencyMap& sal, double ratio, const PatchGrid& grid) {
    if (sal.size() != static_cast<size_t>(grid.n_patches())) {
        throw std::invalid_argument("saliency map size does not match the patch grid");
    }
    if (!(ratio > 0.0) || ratio > 1.0) {
        throw InvalidRatioError("fixation ratio must be in (0, 1]");
    }
    const int k = static_cast<int>(std::floor(ratio * grid.n_patches()));
    if (k < 1) {
        throw EmptySelectionError("fixation ratio keeps zero patches");
    }
    std::vector<int> order(sal.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (sal[a] != sal[b]) return sal[a] > sal[b];
        return a < b;
    });
    FixationSet fix;
    fix.ratio = ratio;
    fix.selected.assign(order.begin(), order.begin() + k);
    fix.scores.reserve(k);
    for (int idx : fix.selected) {
        fix.scores.push_back(sal[idx]);
    }
    return fix;
}

Image mask_image(const Image& img, const FixationSet& fix, const PatchGrid& grid) {
    if (img.rows != grid.image_px || img.cols != grid.image_px) {
        throw std::invalid_argument("image dims do not match the patch grid");
    }
    Image out = Image::zeros(img.rows, img.cols);
    const int side = grid.grid_side();
    const int ps = grid.patch_px;
    for (int idx : fix.selected) {
        if (idx < 0 || idx >= grid.n_patches()) {
            throw std::out_of_range("patch index out of range");
        }
        const int pr = idx / side;
        const int pc = idx % side;
        for (int r = 0; r < ps; ++r) {
            for (int c = 0; c < ps; ++c) {
                out.at(pr * ps + r, pc * ps + c) = img.at(pr * ps + r, pc * ps + c);
            }
        }
    }
    return out;
}

Image extract_patch(const Image& img, int idx, const PatchGrid& grid) {
    if (img.rows != grid.image_px || img.cols != grid.image_px) {
        throw std::invalid_argument("image dims do not match the patch grid");
    }
    if (idx < 0 || idx >= grid.n_patches()) {
        throw std::out_of_range("patch index out of range");
    }
    const int side = grid.grid_side();
    const int ps = grid.patch_px;
    const int pr = idx / side;
    const int pc = idx % side;
    Image patch = Image::zeros(ps, ps);
    for (int r = 0; r < ps; ++r) {
        for (int c = 0; c < ps; ++c) {
            patch.at(r, c) = img.at(pr * ps + r, pc * ps + c);
        }
    }
    return patch;
}

void insert_patch(Image& img, const Image& patch, int idx, const PatchGrid& grid) {
    if (img.rows != grid.image_px || img.cols != grid.image_px ||
        patch.rows != grid.patch_px || patch.cols != grid.patch_px) {
        throw std::invalid_argument("patch or image dims do not match the grid");
    }
    if (idx < 0 || idx >= grid.n_patches()) {
        throw std::out_of_range("patch index out of range");
    }
    const int side = grid.grid_side();
    const int ps = grid.patch_px;
    const int pr = idx / side;
    const int pc = idx % side;
    for (int r = 0; r < ps; ++r) {
        for (int c = 0; c < ps; ++c) {
            img.at(pr * ps + r, pc * ps + c) = patch.at(r, c);
        }
    }
}

SaliencyMap proxy_saliency(const Image& img, const PatchGrid& grid) {
    if (img.rows != grid.image_px || img.cols != grid.image_px) {
        throw std::invalid_argument("image dims do not match the patch grid");
    }
    const int n = grid.image_px;
    auto sample = [&](int r, int c) {
        // Replicate padding.
        return static_cast<double>(img.at(std::clamp(r, 0, n - 1), std::clamp(c, 0, n - 1)));
    };
    std::vector<double> mag(static_cast<size_t>(n) * n);
#pragma omp parallel for schedule(static)
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            const double gx = -sample(r - 1, c - 1) + sample(r - 1, c + 1)
                              - 2.0 * sample(r, c - 1) + 2.0 * sample(r, c + 1)
                              - sample(r + 1, c - 1) + sample(r + 1, c + 1);
            const double gy = -sample(r - 1, c - 1) - 2.0 * sample(r - 1, c) - sample(r - 1, c + 1)
                              + sample(r + 1, c - 1) + 2.0 * sample(r + 1, c) + sample(r + 1, c + 1);
            mag[static_cast<size_t>(r) * n + c] = std::sqrt(gx * gx + gy * gy);
        }
    }
    const int side = grid.grid_side();
    const int ps = grid.patch_px;
    SaliencyMap scores(grid.n_patches(), 0.0);
    for (int pr = 0; pr < side; ++pr) {
        for (int pc = 0; pc < side; ++pc) {
            double sum = 0.0;
            for (int r = 0; r < ps; ++r) {
                for (int c = 0; c < ps; ++c) {
                    sum += mag[static_cast<size_t>(pr * ps + r) * n + pc * ps + c];
                }
            }
            scores[pr * side + pc] = sum / (ps * ps);
        }
    }
    return scores;
}

}  // namespace fixsim
