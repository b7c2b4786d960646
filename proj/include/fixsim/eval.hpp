#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fixsim/config.hpp"
#include "fixsim/dataset.hpp"
#include "fixsim/percept.hpp"

namespace fixsim {

// Side length of the classifier feature raster.
inline constexpr int kFeatureSide = 28;

// Fraction of normalized intensity counted as "lit" by the coverage metric.
inline constexpr double kCoverageThreshold = 0.05;

struct PerceptMetrics {
    double rms_contrast = 0.0;  // stddev of the global-max-normalized raster
    double coverage = 0.0;      // fraction of normalized pixels > threshold
};

PerceptMetrics percept_metrics(const PerceptFrame& frame);

// Box-averages the frame to kFeatureSide^2, flattens row-major and
// L2-normalizes (all-zero stays all-zero). Frame dims must be multiples of
// kFeatureSide.
std::vector<float> featurize_percept(const PerceptFrame& frame);

using Centroids = std::vector<std::vector<float>>;

// Per-class mean of the normalized feature vectors. Throws when a class has
// no samples.
Centroids fit_centroids(const std::vector<std::vector<float>>& features,
                        const std::vector<int>& labels, int n_classes = kNumClasses);

// Nearest centroid by Euclidean distance; ties go to the lowest class id.
int classify(const std::vector<float>& feature, const Centroids& centroids);

struct EvalRow {
    std::string id;
    std::string variant;
    int true_class = 0;
    int predicted_class = 0;
    double rms_contrast = 0.0;
    double coverage = 0.0;

    bool operator==(const EvalRow&) const = default;
};

struct VariantSummary {
    std::string variant;
    int correct = 0;
    int total = 0;
    double accuracy = 0.0;
};

struct EvalReport {
    std::vector<EvalRow> rows;  // sorted by (id, variant)
    std::vector<VariantSummary> summaries;
};

// Runs every requested variant over the same deterministic 80/20 train/val
// split, fits centroids on train percepts, classifies the validation
// percepts, and writes metrics.csv, summary.json and validation percept
// PNGs under config.out_dir. Byte-identical outputs for a fixed
// (config, seed), independent of thread count.
EvalReport evaluate(const RunConfig& config, const std::vector<std::string>& variants);

// The deterministic split used by evaluate: shuffled indices, first 80%
// train, rest validation.
void split_train_val(size_t n, uint64_t seed, std::vector<size_t>& train,
                     std::vector<size_t>& val);

void write_report_csv(const EvalReport& report, const std::string& path);
void write_report_json(const EvalReport& report, const RunConfig& config,
                       const std::string& path);

}  // namespace fixsim
