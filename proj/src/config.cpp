#include "fixsim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fixsim/errors.hpp"

namespace fixsim {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.contains(it.key())) {
            throw ConfigError("unknown config key '" + it.key() + "' in " + where);
        }
    }
}

DecayParams parse_decay(const json& j, std::string& preset_out) {
    reject_unknown_keys(j, {"preset", "rho_um", "lambda_um"}, "decay");
    if (j.contains("preset")) {
        if (j.contains("rho_um") || j.contains("lambda_um")) {
            throw ConfigError("decay preset and explicit rho/lambda are mutually exclusive");
        }
        const std::string preset = j.at("preset").get<std::string>();
        preset_out = preset;
        if (preset == "A") return kPresetA;
        if (preset == "B") return kPresetB;
        throw ConfigError("unknown decay preset '" + preset + "' (expected \"A\" or \"B\")");
    }
    preset_out = "";
    DecayParams decay;
    decay.rho_um = j.at("rho_um").get<double>();
    decay.lambda_um = j.at("lambda_um").get<double>();
    return decay;
}

EncoderSpec parse_encoder(const json& j) {
    reject_unknown_keys(j, {"kind", "gamma", "gain"}, "encoder");
    EncoderSpec enc;
    const std::string kind = j.value("kind", "identity");
    if (kind == "identity") {
        enc.kind = EncoderSpec::Kind::identity;
    } else if (kind == "gamma") {
        enc.kind = EncoderSpec::Kind::gamma;
    } else {
        throw ConfigError("unknown encoder kind '" + kind + "'");
    }
    enc.gamma = j.value("gamma", 2.0);
    enc.gain = j.value("gain", 1.0);
    return enc;
}

}  // namespace

ElectrodeGrid RunConfig::make_grid() const {
    return build_grid(grid.rows, grid.cols, grid.spacing_um, grid.center_um);
}

std::string RunConfig::effective_cache_dir() const {
    return cache_dir.empty() ? out_dir + "/axon_cache" : cache_dir;
}

RunConfig parse_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw ConfigError("config root must be a JSON object");
    }
    reject_unknown_keys(j,
                        {"um_per_deg", "grid", "decay", "trajectory", "render", "prune_sigma",
                         "ratio", "encoder", "dataset", "image_dir", "attention_dir", "variants",
                         "ratio_sweep", "out_dir", "cache_dir", "seed", "threads"},
                        "config root");

    RunConfig cfg;
    try {
        cfg.um_per_deg = j.value("um_per_deg", kDefaultUmPerDeg);
        if (j.contains("grid")) {
            const json& g = j.at("grid");
            reject_unknown_keys(g, {"rows", "cols", "spacing_um", "center_um"}, "grid");
            cfg.grid.rows = g.value("rows", 14);
            cfg.grid.cols = g.value("cols", 14);
            cfg.grid.spacing_um = g.value("spacing_um", 400.0);
            if (g.contains("center_um")) {
                const auto c = g.at("center_um").get<std::vector<double>>();
                if (c.size() != 2) {
                    throw ConfigError("grid.center_um must be [x, y]");
                }
                cfg.grid.center_um = {c[0], c[1]};
            }
        }
        if (j.contains("decay")) {
            cfg.decay = parse_decay(j.at("decay"), cfg.decay_preset);
        }
        if (j.contains("trajectory")) {
            const json& t = j.at("trajectory");
            reject_unknown_keys(
                t, {"n_bundles", "r0_deg", "r_max_deg", "dr_deg", "tau_deg", "optic_disc_deg"},
                "trajectory");
            cfg.trajectory.n_bundles = t.value("n_bundles", 500u);
            cfg.trajectory.r0_deg = t.value("r0_deg", 2.0);
            cfg.trajectory.r_max_deg = t.value("r_max_deg", 45.0);
            cfg.trajectory.dr_deg = t.value("dr_deg", 0.25);
            cfg.trajectory.tau_deg = t.value("tau_deg", 45.0);
            if (t.contains("optic_disc_deg")) {
                const auto d = t.at("optic_disc_deg").get<std::vector<double>>();
                if (d.size() != 2) {
                    throw ConfigError("trajectory.optic_disc_deg must be [x, y]");
                }
                cfg.trajectory.optic_disc_deg = {d[0], d[1]};
            }
        }
        if (j.contains("render")) {
            const json& r = j.at("render");
            reject_unknown_keys(r, {"fixation_px", "full_px"}, "render");
            cfg.fixation_render_px = r.value("fixation_px", 112);
            cfg.full_render_px = r.value("full_px", 224);
        }
        cfg.prune_sigma = j.value("prune_sigma", kDefaultPruneSigma);
        cfg.ratio = j.value("ratio", 0.10);
        if (j.contains("encoder")) {
            cfg.encoder = parse_encoder(j.at("encoder"));
        }
        if (j.contains("dataset")) {
            const json& d = j.at("dataset");
            reject_unknown_keys(d, {"n_per_class"}, "dataset");
            cfg.dataset.n_per_class = d.value("n_per_class", 50);
        }
        cfg.image_dir = j.value("image_dir", std::string());
        cfg.attention_dir = j.value("attention_dir", std::string());
        if (j.contains("variants")) {
            cfg.variants = j.at("variants").get<std::vector<std::string>>();
        }
        if (j.contains("ratio_sweep")) {
            cfg.ratio_sweep = j.at("ratio_sweep").get<std::vector<double>>();
        }
        cfg.out_dir = j.value("out_dir", std::string("out"));
        cfg.cache_dir = j.value("cache_dir", std::string());
        cfg.seed = j.value("seed", uint64_t{1});
        cfg.threads = j.value("threads", 0);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    validate_config(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_json(text.str());
}

std::string config_to_json(const RunConfig& cfg) {
    json j;
    j["um_per_deg"] = cfg.um_per_deg;
    j["grid"] = {{"rows", cfg.grid.rows},
                 {"cols", cfg.grid.cols},
                 {"spacing_um", cfg.grid.spacing_um},
                 {"center_um", {cfg.grid.center_um.x_um, cfg.grid.center_um.y_um}}};
    if (!cfg.decay_preset.empty()) {
        j["decay"] = {{"preset", cfg.decay_preset}};
    } else {
        j["decay"] = {{"rho_um", cfg.decay.rho_um}, {"lambda_um", cfg.decay.lambda_um}};
    }
    j["trajectory"] = {{"n_bundles", cfg.trajectory.n_bundles},
                       {"r0_deg", cfg.trajectory.r0_deg},
                       {"r_max_deg", cfg.trajectory.r_max_deg},
                       {"dr_deg", cfg.trajectory.dr_deg},
                       {"tau_deg", cfg.trajectory.tau_deg},
                       {"optic_disc_deg",
                        {cfg.trajectory.optic_disc_deg.x_deg, cfg.trajectory.optic_disc_deg.y_deg}}};
    j["render"] = {{"fixation_px", cfg.fixation_render_px}, {"full_px", cfg.full_render_px}};
    j["prune_sigma"] = cfg.prune_sigma;
    j["ratio"] = cfg.ratio;
    j["encoder"] = {{"kind", cfg.encoder.kind == EncoderSpec::Kind::identity ? "identity" : "gamma"},
                    {"gamma", cfg.encoder.gamma},
                    {"gain", cfg.encoder.gain}};
    j["dataset"] = {{"n_per_class", cfg.dataset.n_per_class}};
    j["image_dir"] = cfg.image_dir;
    j["attention_dir"] = cfg.attention_dir;
    j["variants"] = cfg.variants;
    j["ratio_sweep"] = cfg.ratio_sweep;
    j["out_dir"] = cfg.out_dir;
    j["cache_dir"] = cfg.cache_dir;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    return j.dump(2) + "\n";
}

void validate_config(const RunConfig& cfg) {
    try {
        if (cfg.grid.rows < 1 || cfg.grid.cols < 1 || !(cfg.grid.spacing_um > 0.0)) {
            throw ConfigError("grid dims must be positive, spacing_um > 0");
        }
        if (!(cfg.decay.rho_um > 0.0) || !(cfg.decay.lambda_um > 0.0)) {
            throw ConfigError("decay constants must be positive");
        }
        TrajectoryParams traj = cfg.trajectory;
        traj.um_per_deg = cfg.um_per_deg;
        validate_trajectory_params(traj);
        if (cfg.fixation_render_px < 1 || cfg.full_render_px < 1) {
            throw ConfigError("render dims must be positive");
        }
        if (!(cfg.prune_sigma > 0.0)) {
            throw ConfigError("prune_sigma must be positive");
        }
        if (!(cfg.ratio > 0.0) || cfg.ratio > 1.0) {
            throw ConfigError("ratio must be in (0, 1]");
        }
        for (double r : cfg.ratio_sweep) {
            if (!(r > 0.0) || r > 1.0) {
                throw ConfigError("ratio_sweep entries must be in (0, 1]");
            }
        }
        validate_encoder(cfg.encoder);
        if (cfg.dataset.n_per_class < 1) {
            throw ConfigError("dataset.n_per_class must be at least 1");
        }
        if (cfg.threads < 0) {
            throw ConfigError("threads must be >= 0");
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace fixsim
