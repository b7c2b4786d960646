#pragma once

#include <cstdint>

namespace fixsim {

// SplitMix64 (Steele, Lea & Flood; Vigna's reference constants). Chosen for
// the dataset generator and split shuffling because its output is a pure
// function of 64-bit integer arithmetic, so streams are identical on every
// platform.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1), 53 bits of mantissa.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform double in [lo, hi).
    double next_range(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Uniform integer in [0, n). Modulo bias is irrelevant at the stream
    // lengths used here; what matters is that the mapping is pinned.
    uint64_t next_below(uint64_t n) {
        return next() % n;
    }

private:
    uint64_t state_;
};

// Derives an independent child seed from (seed, stream_id). Different
// stream ids never share a generator, so e.g. dataset generation and the
// train/val split cannot perturb each other.
inline uint64_t derive_seed(uint64_t seed, uint64_t stream_id) {
    SplitMix64 rng(seed ^ (stream_id * 0xA24BAED4963EE407ULL));
    return rng.next();
}

// Stream ids for the top-level run seed.
inline constexpr uint64_t kStreamDataset = 1;
inline constexpr uint64_t kStreamSplit = 2;

}  // namespace fixsim
