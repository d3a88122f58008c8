#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "samlab/common.hpp"
#include "samlab/dataset.hpp"
#include "samlab/model.hpp"
#include "samlab/optimizer.hpp"
#include "samlab/train.hpp"

namespace samlab {

using json = nlohmann::json;

/// One post-training analysis request.
struct ProbeSpec {
    std::string kind;  // ray | grid | cosine | decrease | spectrum
    double rho = 0.1;
    int steps = 5;          // ray: N; cosine: K; spectrum: top-k; grid/decrease: the larger N
    int iterations = 100;   // spectrum power iterations
    double lr = 0.1;        // decrease matrix step size
    std::uint64_t seed = 1; // spectrum start vectors
    int grid_points = 41;   // grid resolution per axis
    int batch_size = 0;     // 0 = the training batch size
};

/// Full experiment description; everything a reproduction needs.
struct RunConfig {
    std::string name = "run";
    ModelSpec model;
    DatasetSpec data;
    OptimizerConfig optimizer;
    TrainOptions train;
    std::vector<std::uint64_t> seeds = {1};
    std::vector<ProbeSpec> analyses;
};

namespace cfg_detail {

template <typename T>
T field(const json& j, const std::string& key, const T& fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config field '" + key + "': " + e.what());
    }
}

template <typename T>
T require(const json& j, const std::string& key, const std::string& section) {
    if (!j.contains(key)) throw ConfigError("config section '" + section + "' is missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config field '" + section + "." + key + "': " + e.what());
    }
}

} // namespace cfg_detail

inline json to_json(const ModelSpec& m) {
    json j;
    j["widths"] = m.widths;
    std::vector<std::string> acts;
    for (auto a : m.activations) acts.push_back(to_string(a));
    j["activations"] = acts;
    j["loss"] = to_string(m.loss);
    j["with_bias"] = m.with_bias;
    j["init_seed"] = m.init_seed;
    return j;
}

inline ModelSpec model_from_json(const json& j) {
    ModelSpec m;
    m.widths = cfg_detail::require<std::vector<int>>(j, "widths", "model");
    const auto acts = cfg_detail::field<std::vector<std::string>>(j, "activations", {});
    if (acts.empty()) {
        // default: tanh hidden layers, identity head
        for (int l = 0; l + 2 < static_cast<int>(m.widths.size()); ++l)
            m.activations.push_back(Activation::tanh_fn);
        m.activations.push_back(Activation::identity);
    } else {
        for (const auto& s : acts) m.activations.push_back(activation_from_string(s));
    }
    m.loss = loss_from_string(cfg_detail::field<std::string>(j, "loss", "softmax_ce"));
    m.with_bias = cfg_detail::field<bool>(j, "with_bias", true);
    m.init_seed = cfg_detail::field<std::uint64_t>(j, "init_seed", 1);
    validate(m);
    return m;
}

inline json to_json(const DatasetSpec& d) {
    json j;
    j["generator"] = to_string(d.kind);
    j["train_count"] = d.train_count;
    j["test_count"] = d.test_count;
    j["label_noise"] = d.label_noise;
    j["seed"] = d.seed;
    j["input_dim"] = d.input_dim;
    j["classes"] = d.classes;
    return j;
}

inline DatasetSpec dataset_from_json(const json& j) {
    DatasetSpec d;
    d.kind = generator_from_string(cfg_detail::require<std::string>(j, "generator", "data"));
    d.train_count = cfg_detail::field<int>(j, "train_count", 200);
    d.test_count = cfg_detail::field<int>(j, "test_count", 200);
    d.label_noise = cfg_detail::field<double>(j, "label_noise", 0.0);
    d.seed = cfg_detail::field<std::uint64_t>(j, "seed", 7);
    d.input_dim = cfg_detail::field<int>(j, "input_dim", 2);
    d.classes = cfg_detail::field<int>(j, "classes", 2);
    return d;
}

inline json to_json(const OptimizerConfig& o) {
    json j;
    j["kind"] = to_string(o.kind);
    j["lr"] = o.lr;
    j["rho"] = o.ascent.rho;
    j["steps"] = o.ascent.steps;
    if (!o.ascent.step_radii.empty()) j["step_radii"] = o.ascent.step_radii;
    j["renormalize_final"] = o.ascent.renormalize_final;
    if (!o.msam_weights.empty()) j["msam_weights"] = o.msam_weights;
    return j;
}

inline OptimizerConfig optimizer_from_json(const json& j) {
    OptimizerConfig o;
    o.kind = opt_kind_from_string(cfg_detail::require<std::string>(j, "kind", "optimizer"));
    o.lr = cfg_detail::field<double>(j, "lr", 0.1);
    o.ascent.rho = cfg_detail::field<double>(j, "rho", 0.05);
    o.ascent.steps = cfg_detail::field<int>(j, "steps", 1);
    o.ascent.step_radii = cfg_detail::field<std::vector<double>>(j, "step_radii", {});
    o.ascent.renormalize_final = cfg_detail::field<bool>(j, "renormalize_final", true);
    o.msam_weights = cfg_detail::field<std::vector<double>>(j, "msam_weights", {});
    o.validate();
    return o;
}

inline json to_json(const TrainOptions& t) {
    json j;
    j["epochs"] = t.epochs;
    j["batch_size"] = t.batch_size;
    j["schedule"] = to_string(t.schedule);
    j["momentum"] = t.momentum;
    return j;
}

inline TrainOptions train_from_json(const json& j) {
    TrainOptions t;
    t.epochs = cfg_detail::field<int>(j, "epochs", 50);
    t.batch_size = cfg_detail::field<int>(j, "batch_size", 32);
    t.schedule = schedule_from_string(cfg_detail::field<std::string>(j, "schedule", "constant"));
    t.momentum = cfg_detail::field<double>(j, "momentum", 0.0);
    return t;
}

inline json to_json(const ProbeSpec& p) {
    json j;
    j["kind"] = p.kind;
    j["rho"] = p.rho;
    j["steps"] = p.steps;
    j["iterations"] = p.iterations;
    j["lr"] = p.lr;
    j["seed"] = p.seed;
    j["grid_points"] = p.grid_points;
    j["batch_size"] = p.batch_size;
    return j;
}

inline ProbeSpec probe_from_json(const json& j) {
    ProbeSpec p;
    p.kind = cfg_detail::require<std::string>(j, "kind", "analyses");
    p.rho = cfg_detail::field<double>(j, "rho", 0.1);
    p.steps = cfg_detail::field<int>(j, "steps", 5);
    p.iterations = cfg_detail::field<int>(j, "iterations", 100);
    p.lr = cfg_detail::field<double>(j, "lr", 0.1);
    p.seed = cfg_detail::field<std::uint64_t>(j, "seed", 1);
    p.grid_points = cfg_detail::field<int>(j, "grid_points", 41);
    p.batch_size = cfg_detail::field<int>(j, "batch_size", 0);
    return p;
}

inline json to_json(const RunConfig& c) {
    json j;
    j["name"] = c.name;
    j["model"] = to_json(c.model);
    j["data"] = to_json(c.data);
    j["optimizer"] = to_json(c.optimizer);
    j["train"] = to_json(c.train);
    j["seeds"] = c.seeds;
    if (!c.analyses.empty()) {
        json arr = json::array();
        for (const auto& p : c.analyses) arr.push_back(to_json(p));
        j["analyses"] = arr;
    }
    return j;
}

inline RunConfig run_config_from_json(const json& j) {
    RunConfig c;
    c.name = cfg_detail::field<std::string>(j, "name", "run");
    if (!j.contains("model")) throw ConfigError("config is missing section 'model'");
    if (!j.contains("data")) throw ConfigError("config is missing section 'data'");
    if (!j.contains("optimizer")) throw ConfigError("config is missing section 'optimizer'");
    c.model = model_from_json(j.at("model"));
    c.data = dataset_from_json(j.at("data"));
    c.optimizer = optimizer_from_json(j.at("optimizer"));
    c.train = train_from_json(j.contains("train") ? j.at("train") : json::object());
    c.seeds = cfg_detail::field<std::vector<std::uint64_t>>(j, "seeds", {1});
    if (c.seeds.empty()) throw ConfigError("config needs at least one seed");
    if (j.contains("analyses"))
        for (const auto& pj : j.at("analyses")) c.analyses.push_back(probe_from_json(pj));

    if (c.model.input_dim() != c.data.input_dim)
        throw ConfigError("model input width must equal data.input_dim");
    const bool regression = c.data.kind == DataGenerator::random_regression;
    const int want_out = regression ? 1 : c.data.classes;
    if (c.model.output_dim() != want_out)
        throw ConfigError("model output width must equal " +
                          std::string(regression ? "1 for regression" : "the class count"));
    if (regression && c.model.loss == LossKind::softmax_ce)
        throw ConfigError("softmax cross-entropy needs a classification dataset");
    return c;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
    RunConfig c = run_config_from_json(j);
    if (c.name == "run") {
        // default the run name to the file stem
        auto slash = path.find_last_of("/\\");
        std::string stem = slash == std::string::npos ? path : path.substr(slash + 1);
        auto dot = stem.find_last_of('.');
        c.name = dot == std::string::npos ? stem : stem.substr(0, dot);
    }
    return c;
}

} // namespace samlab
