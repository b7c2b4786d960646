#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fixsim/config.hpp"
#include "fixsim/dataset.hpp"
#include "fixsim/encoding.hpp"
#include "fixsim/errors.hpp"
#include "fixsim/eval.hpp"

namespace {

using namespace fixsim;

struct CommonFlags {
    std::string config_path;
    std::string out;
    int64_t seed = -1;
    int threads = -1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON run configuration");
        cmd->add_option("--out", out, "Output directory or file");
        cmd->add_option("--seed", seed, "Override the config seed");
        cmd->add_option("--threads", threads, "Worker threads (0 = default)");
    }

    RunConfig resolve() const {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (!out.empty()) cfg.out_dir = out;
        if (seed >= 0) cfg.seed = static_cast<uint64_t>(seed);
        if (threads >= 0) cfg.threads = threads;
        if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
        return cfg;
    }
};

std::string hash_hex(uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

TrajectoryParams effective_trajectory(const RunConfig& cfg) {
    TrajectoryParams traj = cfg.trajectory;
    traj.um_per_deg = cfg.um_per_deg;
    return traj;
}

RenderWindow default_window(const RunConfig& cfg, const ElectrodeGrid& grid) {
    return percept_window(grid, 3.0 * cfg.decay.rho_um);
}

// Keyed cache lookup: load on hit, otherwise build and persist. A cache file
// that fails to load (corrupt, stale, old version) is rebuilt in place.
AxonMap get_or_build_map(const RunConfig& cfg, const RenderWindow& window, int px) {
    const TrajectoryParams traj = effective_trajectory(cfg);
    const std::string dir = cfg.effective_cache_dir();
    std::filesystem::create_directories(dir);
    const std::string path =
        dir + "/axmp_" + hash_hex(axon_map_content_hash(traj, window, px, px)) + ".axmp";
    if (std::filesystem::exists(path)) {
        try {
            return load_axon_map_checked(path, traj, window, px, px);
        } catch (const FormatError& e) {
            std::cerr << "warning: rebuilding unusable cache: " << e.what() << "\n";
        }
    }
    AxonMap map = build_axon_map(window, px, px, traj);
    save_axon_map(map, path);
    return map;
}

SaliencyMap saliency_for(const Image& img, const std::string& attention_path,
                         const PatchGrid& patch_grid) {
    if (!attention_path.empty()) {
        return reduce_attention(load_tensor(attention_path), patch_grid);
    }
    return proxy_saliency(img, patch_grid);
}

void write_fixations_json(const FixationSet& fix, const std::string& path) {
    nlohmann::json j;
    j["ratio"] = fix.ratio;
    j["selected"] = fix.selected;
    j["scores"] = fix.scores;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

int cmd_axonmap_build(const CommonFlags& flags, const std::string& kind, bool force) {
    RunConfig cfg = flags.resolve();
    const ElectrodeGrid grid = cfg.make_grid();
    const RenderWindow window = default_window(cfg, grid);
    const int px = kind == "fixation" ? cfg.fixation_render_px : cfg.full_render_px;
    const TrajectoryParams traj = effective_trajectory(cfg);

    std::string path = flags.out;
    if (path.empty() || std::filesystem::is_directory(path)) {
        const std::string dir = path.empty() ? cfg.effective_cache_dir() : path;
        std::filesystem::create_directories(dir);
        path = dir + "/axmp_" + hash_hex(axon_map_content_hash(traj, window, px, px)) + ".axmp";
    }
    if (!force && std::filesystem::exists(path)) {
        load_axon_map_checked(path, traj, window, px, px);
        std::cout << "cache up to date: " << path << "\n";
        return 0;
    }
    const AxonMap map = build_axon_map(window, px, px, traj);
    save_axon_map(map, path);
    std::cout << "wrote " << path << " (" << map.bundles.size() << " bundles, " << map.rows
              << "x" << map.cols << " pixels)\n";
    return 0;
}

int cmd_dataset_gen(const CommonFlags& flags, int n_per_class) {
    RunConfig cfg = flags.resolve();
    if (n_per_class > 0) cfg.dataset.n_per_class = n_per_class;
    const auto data = generate_synthetic_dataset(cfg.dataset.n_per_class, cfg.seed);
    write_dataset(data, cfg.out_dir);
    std::cout << "wrote " << data.size() << " images to " << cfg.out_dir << "\n";
    return 0;
}

int cmd_fixate(const CommonFlags& flags, const std::string& image_path,
               const std::string& attention_path, double ratio) {
    RunConfig cfg = flags.resolve();
    if (ratio > 0.0) cfg.ratio = ratio;
    const Image img = read_image_png(image_path);
    const PatchGrid patch_grid = make_patch_grid(img.rows, 14);
    const SaliencyMap sal = saliency_for(img, attention_path, patch_grid);
    const FixationSet fix = select_fixations(sal, cfg.ratio, patch_grid);

    std::filesystem::create_directories(cfg.out_dir);
    const std::string stem = std::filesystem::path(image_path).stem().string();
    write_image_png(cfg.out_dir + "/" + stem + "_masked.png",
                    quantize_u8(mask_image(img, fix, patch_grid)));
    write_fixations_json(fix, cfg.out_dir + "/" + stem + "_fixations.json");
    std::cout << "selected " << fix.selected.size() << " of " << patch_grid.n_patches()
              << " patches\n";
    return 0;
}

int cmd_simulate(const CommonFlags& flags, const std::string& stimulus_path,
                 const std::string& raw_out) {
    RunConfig cfg = flags.resolve();
    const ElectrodeGrid grid = cfg.make_grid();

    Stimulus stim;
    if (stimulus_path.size() > 5 && stimulus_path.ends_with(".atnf")) {
        const Tensor t = load_tensor(stimulus_path);
        if (t.dims.size() != 2 || t.dims[0] != static_cast<uint32_t>(grid.rows) ||
            t.dims[1] != static_cast<uint32_t>(grid.cols)) {
            throw ConfigError("stimulus tensor dims do not match the electrode grid");
        }
        stim.amplitudes.assign(t.data.begin(), t.data.end());
    } else {
        const Image img = read_image_png(stimulus_path);
        stim = stimulus_from_image(img, grid);
    }

    const RenderWindow window = default_window(cfg, grid);
    const AxonMap map = get_or_build_map(cfg, window, cfg.full_render_px);
    const PerceptFrame frame =
        compute_percept_axon(stim, grid, map, cfg.decay, cfg.prune_sigma);

    std::filesystem::create_directories(cfg.out_dir);
    const std::string stem = std::filesystem::path(stimulus_path).stem().string();
    write_image_png(cfg.out_dir + "/" + stem + "_percept.png", render_percept(frame));
    if (!raw_out.empty()) {
        save_percept_raw(frame, raw_out);
    }
    std::cout << "percept raw max " << frame.raw_max << "\n";
    return 0;
}

int cmd_pipeline(const CommonFlags& flags, const std::string& image_path,
                 const std::string& image_dir, const std::string& mode,
                 const std::string& attention_path) {
    RunConfig cfg = flags.resolve();
    if (mode != "fixation" && mode != "downsampling") {
        throw ConfigError("pipeline mode must be 'fixation' or 'downsampling'");
    }
    std::vector<std::string> inputs;
    if (!image_path.empty()) {
        inputs.push_back(image_path);
    } else if (!image_dir.empty()) {
        for (const auto& entry : std::filesystem::directory_iterator(image_dir)) {
            if (entry.path().extension() == ".png") {
                inputs.push_back(entry.path().string());
            }
        }
        std::sort(inputs.begin(), inputs.end());
    }
    if (inputs.empty()) {
        throw ConfigError("pipeline needs --image or --image-dir with PNG files");
    }

    const ElectrodeGrid grid = cfg.make_grid();
    const RenderWindow window = default_window(cfg, grid);
    const int px = mode == "fixation" ? cfg.fixation_render_px : cfg.full_render_px;
    const AxonMap map = get_or_build_map(cfg, window, px);
    const PipelineOptions opts{cfg.prune_sigma, false};
    std::filesystem::create_directories(cfg.out_dir);

    for (const std::string& input : inputs) {
        const Image img = read_image_png(input);
        const std::string stem = std::filesystem::path(input).stem().string();
        if (mode == "fixation") {
            const PatchGrid patch_grid = make_patch_grid(img.rows, 14);
            std::string att = attention_path;
            if (att.empty() && !cfg.attention_dir.empty()) {
                att = cfg.attention_dir + "/" + stem + ".atnf";
            }
            const SaliencyMap sal = saliency_for(img, att, patch_grid);
            const FixationPipelineResult result = run_fixation_pipeline(
                img, sal, cfg.ratio, cfg.encoder, patch_grid, grid, map, cfg.decay, opts);
            write_image_png(cfg.out_dir + "/" + stem + "_percept.png",
                            render_percept(result.canvas));
            write_fixations_json(result.fixations, cfg.out_dir + "/" + stem + "_fixations.json");
        } else {
            const PerceptFrame frame =
                run_downsampling_pipeline(img, cfg.encoder, grid, map, cfg.decay, opts);
            write_image_png(cfg.out_dir + "/" + stem + "_percept.png", render_percept(frame));
        }
    }
    std::cout << "processed " << inputs.size() << " image(s) into " << cfg.out_dir << "\n";
    return 0;
}

int cmd_eval(const CommonFlags& flags) {
    const RunConfig cfg = flags.resolve();
    const EvalReport report = evaluate(cfg, cfg.variants);
    for (const VariantSummary& s : report.summaries) {
        std::printf("%-32s accuracy %6.2f%% (%d/%d)\n", s.variant.c_str(), 100.0 * s.accuracy,
                    s.correct, s.total);
    }
    std::cout << "report written to " << cfg.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fixation-driven retinal prosthetic vision simulator"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto* axonmap = app.add_subcommand("axonmap", "Axon map cache management");
    axonmap->require_subcommand(1);
    auto* axonmap_build = axonmap->add_subcommand("build", "Build (or refresh) an axon map cache");
    flags.attach(axonmap_build);
    std::string map_kind = "full";
    bool force = false;
    axonmap_build->add_option("--kind", map_kind, "Render raster: full or fixation")
        ->check(CLI::IsMember({"full", "fixation"}));
    axonmap_build->add_flag("--force", force, "Rebuild even when the cache is current");

    auto* dataset = app.add_subcommand("dataset", "Synthetic dataset tools");
    dataset->require_subcommand(1);
    auto* dataset_gen = dataset->add_subcommand("gen", "Generate the synthetic shape dataset");
    flags.attach(dataset_gen);
    int n_per_class = 0;
    dataset_gen->add_option("--n-per-class", n_per_class, "Images per class");

    auto* fixate = app.add_subcommand("fixate", "Select salient patches and mask an image");
    flags.attach(fixate);
    std::string image_path, attention_path;
    double ratio = 0.0;
    fixate->add_option("--image", image_path, "Input PNG")->required();
    fixate->add_option("--attention", attention_path, "Attention tensor (ATNF)");
    fixate->add_option("--ratio", ratio, "Fraction of patches to keep");

    auto* simulate = app.add_subcommand("simulate", "Predict the percept for a stimulus");
    flags.attach(simulate);
    std::string stimulus_path, raw_out;
    simulate->add_option("--stimulus", stimulus_path, "Stimulus raster (PNG or ATNF)")->required();
    simulate->add_option("--raw", raw_out, "Also dump the raw frame as ATNF");

    auto* pipeline = app.add_subcommand("pipeline", "Run a stimulation pipeline end to end");
    flags.attach(pipeline);
    std::string pipe_image, pipe_dir, pipe_mode = "fixation", pipe_attention;
    pipeline->add_option("--image", pipe_image, "Single input PNG");
    pipeline->add_option("--image-dir", pipe_dir, "Directory of input PNGs");
    pipeline->add_option("--mode", pipe_mode, "fixation or downsampling")
        ->check(CLI::IsMember({"fixation", "downsampling"}));
    pipeline->add_option("--attention", pipe_attention, "Attention tensor for --image");

    auto* eval_cmd = app.add_subcommand("eval", "Run the classification evaluation harness");
    flags.attach(eval_cmd);

    try {
        app.parse(argc, argv);
        if (axonmap_build->parsed()) return cmd_axonmap_build(flags, map_kind, force);
        if (dataset_gen->parsed()) return cmd_dataset_gen(flags, n_per_class);
        if (fixate->parsed()) return cmd_fixate(flags, image_path, attention_path, ratio);
        if (simulate->parsed()) return cmd_simulate(flags, stimulus_path, raw_out);
        if (pipeline->parsed())
            return cmd_pipeline(flags, pipe_image, pipe_dir, pipe_mode, pipe_attention);
        if (eval_cmd->parsed()) return cmd_eval(flags);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const fixsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const fixsim::FormatError& e) {
        std::cerr << "data format error: " << e.what() << "\n";
        return 4;
    } catch (const fixsim::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
