#include "fixsim/eval.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "fixsim/encoding.hpp"
#include "fixsim/errors.hpp"
#include "fixsim/rng.hpp"

namespace fixsim {

PerceptMetrics percept_metrics(const PerceptFrame& frame) {
    PerceptMetrics m;
    if (frame.raw_max <= 0.0 || frame.intensities.empty()) {
        return m;
    }
    const double n = static_cast<double>(frame.intensities.size());
    double sum = 0.0;
    size_t lit = 0;
    for (double v : frame.intensities) {
        const double x = v / frame.raw_max;
        sum += x;
        if (x > kCoverageThreshold) {
            ++lit;
        }
    }
    const double mean = sum / n;
    double var = 0.0;
    for (double v : frame.intensities) {
        const double d = v / frame.raw_max - mean;
        var += d * d;
    }
    m.rms_contrast = std::sqrt(var / n);
    m.coverage = static_cast<double>(lit) / n;
    return m;
}

std::vector<float> featurize_percept(const PerceptFrame& frame) {
    if (frame.rows % kFeatureSide != 0 || frame.cols % kFeatureSide != 0) {
        throw std::invalid_argument("percept dims must be multiples of the feature raster");
    }
    const int br = frame.rows / kFeatureSide;
    const int bc = frame.cols / kFeatureSide;
    std::vector<double> feat(static_cast<size_t>(kFeatureSide) * kFeatureSide, 0.0);
    for (int r = 0; r < kFeatureSide; ++r) {
        for (int c = 0; c < kFeatureSide; ++c) {
            double sum = 0.0;
            for (int i = 0; i < br; ++i) {
                for (int j = 0; j < bc; ++j) {
                    sum += frame.at(r * br + i, c * bc + j);
                }
            }
            feat[static_cast<size_t>(r) * kFeatureSide + c] = sum / (br * bc);
        }
    }
    double norm_sq = 0.0;
    for (double v : feat) {
        norm_sq += v * v;
    }
    std::vector<float> out(feat.size());
    const double norm = std::sqrt(norm_sq);
    for (size_t i = 0; i < feat.size(); ++i) {
        out[i] = norm > 0.0 ? static_cast<float>(feat[i] / norm) : 0.0f;
    }
    return out;
}

Centroids fit_centroids(const std::vector<std::vector<float>>& features,
                        const std::vector<int>& labels, int n_classes) {
    if (features.size() != labels.size()) {
        throw std::invalid_argument("feature/label count mismatch");
    }
    const size_t dim = features.empty() ? 0 : features[0].size();
    std::vector<std::vector<double>> sums(n_classes, std::vector<double>(dim, 0.0));
    std::vector<int> counts(n_classes, 0);
    for (size_t i = 0; i < features.size(); ++i) {
        const int label = labels[i];
        if (label < 0 || label >= n_classes) {
            throw std::invalid_argument("label out of range");
        }
        if (features[i].size() != dim) {
            throw std::invalid_argument("inconsistent feature dimensions");
        }
        for (size_t d = 0; d < dim; ++d) {
            sums[label][d] += features[i][d];
        }
        counts[label]++;
    }
    Centroids centroids(n_classes, std::vector<float>(dim, 0.0f));
    for (int k = 0; k < n_classes; ++k) {
        if (counts[k] == 0) {
            throw std::invalid_argument("class " + std::to_string(k) +
                                        " has no training samples");
        }
        for (size_t d = 0; d < dim; ++d) {
            centroids[k][d] = static_cast<float>(sums[k][d] / counts[k]);
        }
    }
    return centroids;
}

int classify(const std::vector<float>& feature, const Centroids& centroids) {
    if (centroids.empty()) {
        throw std::invalid_argument("no centroids fitted");
    }
    int best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < centroids.size(); ++k) {
        double d2 = 0.0;
        for (size_t d = 0; d < feature.size(); ++d) {
            const double diff = static_cast<double>(feature[d]) - centroids[k][d];
            d2 += diff * diff;
        }
        if (d2 < best_d2) {
            best_d2 = d2;
            best = static_cast<int>(k);
        }
    }
    return best;
}

void split_train_val(size_t n, uint64_t seed, std::vector<size_t>& train,
                     std::vector<size_t>& val) {
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    SplitMix64 rng(derive_seed(seed, kStreamSplit));
    for (size_t i = n; i > 1; --i) {
        const size_t j = rng.next_below(i);
        std::swap(order[i - 1], order[j]);
    }
    const size_t n_train = static_cast<size_t>(std::floor(0.8 * static_cast<double>(n)));
    train.assign(order.begin(), order.begin() + n_train);
    val.assign(order.begin() + n_train, order.end());
}

namespace {

struct VariantSpec {
    std::string name;
    bool fixation = true;
    EncoderSpec enc;
    double ratio = 0.10;
};

VariantSpec parse_variant(const std::string& name, const RunConfig& config) {
    VariantSpec spec;
    spec.name = name;
    spec.ratio = config.ratio;
    std::string base = name;
    const size_t at = name.find('@');
    if (at != std::string::npos) {
        base = name.substr(0, at);
        spec.ratio = std::stod(name.substr(at + 1));
    }
    const size_t dash = base.find('-');
    const std::string pipeline = base.substr(0, dash);
    const std::string encoder = dash == std::string::npos ? "identity" : base.substr(dash + 1);
    if (pipeline == "fixation") {
        spec.fixation = true;
    } else if (pipeline == "downsampling") {
        spec.fixation = false;
    } else {
        throw ConfigError("unknown pipeline in variant '" + name + "'");
    }
    if (encoder == "identity") {
        spec.enc.kind = EncoderSpec::Kind::identity;
    } else if (encoder == "gamma") {
        spec.enc = config.encoder;
        spec.enc.kind = EncoderSpec::Kind::gamma;
    } else {
        throw ConfigError("unknown encoder in variant '" + name + "'");
    }
    return spec;
}

std::string format_ratio(double ratio) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", ratio);
    return buf;
}

std::string format_metric(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

EvalReport evaluate(const RunConfig& config, const std::vector<std::string>& variant_names) {
    validate_config(config);
    if (config.threads > 0) {
        omp_set_num_threads(config.threads);
    }

    std::vector<VariantSpec> variants;
    for (const std::string& name : variant_names) {
        variants.push_back(parse_variant(name, config));
    }
    for (double ratio : config.ratio_sweep) {
        for (const std::string& name : variant_names) {
            VariantSpec spec = parse_variant(name, config);
            if (!spec.fixation) continue;
            spec.ratio = ratio;
            spec.name = name + "@" + format_ratio(ratio);
            variants.push_back(spec);
        }
    }
    if (variants.empty()) {
        throw ConfigError("no variants requested");
    }

    const std::vector<LabeledImage> data =
        config.image_dir.empty()
            ? generate_synthetic_dataset(config.dataset.n_per_class, config.seed)
            : load_dataset(config.image_dir);
    const size_t n = data.size();

    const PatchGrid patch_grid = make_patch_grid(data[0].image.rows, 14);
    const ElectrodeGrid grid = config.make_grid();

    // Saliency is shared by every fixation variant.
    const bool any_fixation =
        std::any_of(variants.begin(), variants.end(), [](const auto& v) { return v.fixation; });
    const bool any_downsampling =
        std::any_of(variants.begin(), variants.end(), [](const auto& v) { return !v.fixation; });
    std::vector<SaliencyMap> saliency(n);
    if (any_fixation) {
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < static_cast<long>(n); ++i) {
            if (!config.attention_dir.empty()) {
                const Tensor att =
                    load_tensor(config.attention_dir + "/" + data[i].id + ".atnf");
                saliency[i] = reduce_attention(att, patch_grid);
            } else {
                saliency[i] = proxy_saliency(data[i].image, patch_grid);
            }
        }
    }

    TrajectoryParams traj = config.trajectory;
    traj.um_per_deg = config.um_per_deg;
    const double margin = 3.0 * config.decay.rho_um;
    const RenderWindow window = percept_window(grid, margin);
    AxonMap fixation_map, full_map;
    if (any_fixation) {
        fixation_map =
            build_axon_map(window, config.fixation_render_px, config.fixation_render_px, traj);
    }
    if (any_downsampling) {
        full_map = build_axon_map(window, config.full_render_px, config.full_render_px, traj);
    }

    std::vector<size_t> train, val;
    split_train_val(n, config.seed, train, val);
    std::vector<bool> is_val(n, false);
    for (size_t i : val) {
        is_val[i] = true;
    }

    std::filesystem::create_directories(config.out_dir);
    const PipelineOptions opts{config.prune_sigma, false};

    EvalReport report;
    for (const VariantSpec& variant : variants) {
        const std::string percept_dir = config.out_dir + "/percepts/" + variant.name;
        std::filesystem::create_directories(percept_dir);

        std::vector<std::vector<float>> features(n);
        std::vector<PerceptMetrics> metrics(n);
        std::exception_ptr first_error;
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < static_cast<long>(n); ++i) {
            try {
                PerceptFrame frame;
                if (variant.fixation) {
                    frame = run_fixation_pipeline(data[i].image, saliency[i], variant.ratio,
                                                  variant.enc, patch_grid, grid, fixation_map,
                                                  config.decay, opts)
                                .canvas;
                } else {
                    frame = run_downsampling_pipeline(data[i].image, variant.enc, grid, full_map,
                                                      config.decay, opts);
                }
                features[i] = featurize_percept(frame);
                metrics[i] = percept_metrics(frame);
                if (is_val[i]) {
                    write_image_png(percept_dir + "/" + data[i].id + ".png",
                                    render_percept(frame));
                }
            } catch (...) {
#pragma omp critical
                if (!first_error) {
                    first_error = std::current_exception();
                }
            }
        }
        if (first_error) {
            // Flush whatever completed before propagating.
            write_report_csv(report, config.out_dir + "/metrics.csv");
            write_report_json(report, config, config.out_dir + "/summary.json");
            std::rethrow_exception(first_error);
        }

        std::vector<std::vector<float>> train_features;
        std::vector<int> train_labels;
        train_features.reserve(train.size());
        for (size_t i : train) {
            train_features.push_back(features[i]);
            train_labels.push_back(data[i].label);
        }
        const Centroids centroids = fit_centroids(train_features, train_labels);

        VariantSummary summary;
        summary.variant = variant.name;
        for (size_t i : val) {
            EvalRow row;
            row.id = data[i].id;
            row.variant = variant.name;
            row.true_class = data[i].label;
            row.predicted_class = classify(features[i], centroids);
            row.rms_contrast = metrics[i].rms_contrast;
            row.coverage = metrics[i].coverage;
            report.rows.push_back(row);
            summary.total++;
            if (row.predicted_class == row.true_class) {
                summary.correct++;
            }
        }
        summary.accuracy =
            summary.total > 0 ? static_cast<double>(summary.correct) / summary.total : 0.0;
        report.summaries.push_back(summary);
    }

    std::sort(report.rows.begin(), report.rows.end(), [](const EvalRow& a, const EvalRow& b) {
        if (a.id != b.id) return a.id < b.id;
        return a.variant < b.variant;
    });
    write_report_csv(report, config.out_dir + "/metrics.csv");
    write_report_json(report, config, config.out_dir + "/summary.json");
    return report;
}

void write_report_csv(const EvalReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write report CSV '" + path + "'");
    }
    out << "id,variant,true_class,predicted_class,rms_contrast,coverage\n";
    for (const EvalRow& row : report.rows) {
        out << row.id << "," << row.variant << "," << row.true_class << ","
            << row.predicted_class << "," << format_metric(row.rms_contrast) << ","
            << format_metric(row.coverage) << "\n";
    }
}

void write_report_json(const EvalReport& report, const RunConfig& config,
                       const std::string& path) {
    nlohmann::json j;
    j["seed"] = config.seed;
    j["decay"] = {{"preset", config.decay_preset},
                  {"rho_um", config.decay.rho_um},
                  {"lambda_um", config.decay.lambda_um}};
    nlohmann::json variants = nlohmann::json::object();
    for (const VariantSummary& s : report.summaries) {
        variants[s.variant] = {
            {"correct", s.correct}, {"total", s.total}, {"accuracy", s.accuracy}};
    }
    j["variants"] = variants;
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write report JSON '" + path + "'");
    }
    out << j.dump(2) << "\n";
}

}  // namespace fixsim
