#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "samlab/common.hpp"
#include "samlab/prng.hpp"
#include "samlab/vecmath.hpp"

namespace samlab {

/// Flat vector of every model parameter, layer by layer (weights then bias).
using ParamVector = Vec;
/// Gradient w.r.t. a ParamVector; always the same length.
using GradVector = Vec;

enum class Activation { identity, tanh_fn, softplus, relu };
enum class LossKind { mse, softmax_ce, mean_output };

inline std::string to_string(Activation a) {
    switch (a) {
        case Activation::identity: return "identity";
        case Activation::tanh_fn: return "tanh";
        case Activation::softplus: return "softplus";
        case Activation::relu: return "relu";
    }
    return "?";
}

inline std::string to_string(LossKind l) {
    switch (l) {
        case LossKind::mse: return "mse";
        case LossKind::softmax_ce: return "softmax_ce";
        case LossKind::mean_output: return "mean_output";
    }
    return "?";
}

inline Activation activation_from_string(const std::string& s) {
    if (s == "identity") return Activation::identity;
    if (s == "tanh") return Activation::tanh_fn;
    if (s == "softplus") return Activation::softplus;
    if (s == "relu") return Activation::relu;
    throw ConfigError("unknown activation '" + s + "'");
}

inline LossKind loss_from_string(const std::string& s) {
    if (s == "mse") return LossKind::mse;
    if (s == "softmax_ce") return LossKind::softmax_ce;
    if (s == "mean_output") return LossKind::mean_output;
    throw ConfigError("unknown loss '" + s + "'");
}

/// Fully connected feed-forward model description.
struct ModelSpec {
    std::vector<int> widths;               // [input, hidden..., output]
    std::vector<Activation> activations;   // one per layer; last is usually identity
    LossKind loss = LossKind::softmax_ce;
    std::uint64_t init_seed = 1;
    bool with_bias = true;

    int layer_count() const { return static_cast<int>(widths.size()) - 1; }
    int input_dim() const { return widths.front(); }
    int output_dim() const { return widths.back(); }
};

struct LayerLayout {
    int in = 0;
    int out = 0;
    int weight_offset = 0;  // out*in doubles, row-major (out rows of in)
    int bias_offset = -1;   // out doubles, or -1 when the model has no biases
};

inline void validate(const ModelSpec& spec) {
    if (spec.widths.size() < 2) throw ConfigError("model needs at least one layer");
    for (int w : spec.widths) {
        if (w <= 0) throw ConfigError("model widths must be positive");
    }
    if (spec.activations.size() != static_cast<std::size_t>(spec.layer_count()))
        throw ConfigError("model needs one activation per layer");
}

inline std::vector<LayerLayout> layer_layout(const ModelSpec& spec) {
    validate(spec);
    std::vector<LayerLayout> layout;
    int offset = 0;
    for (int l = 0; l < spec.layer_count(); ++l) {
        LayerLayout ll;
        ll.in = spec.widths[static_cast<std::size_t>(l)];
        ll.out = spec.widths[static_cast<std::size_t>(l) + 1];
        ll.weight_offset = offset;
        offset += ll.out * ll.in;
        if (spec.with_bias) {
            ll.bias_offset = offset;
            offset += ll.out;
        }
        layout.push_back(ll);
    }
    return layout;
}

inline int param_count(const ModelSpec& spec) {
    int count = 0;
    for (const auto& ll : layer_layout(spec)) {
        count += ll.out * ll.in + (spec.with_bias ? ll.out : 0);
    }
    return count;
}

/// Scaled-uniform weight init with bound sqrt(6/(fan_in+fan_out)); biases zero.
inline ParamVector init_params(const ModelSpec& spec) {
    const auto layout = layer_layout(spec);
    ParamVector params(static_cast<std::size_t>(param_count(spec)), 0.0);
    Xoshiro256pp rng(spec.init_seed);
    for (const auto& ll : layout) {
        const double bound = std::sqrt(6.0 / (ll.in + ll.out));
        for (int i = 0; i < ll.out * ll.in; ++i)
            params[static_cast<std::size_t>(ll.weight_offset + i)] = rng.uniform(-bound, bound);
        // biases stay zero
    }
    return params;
}

/// The default experiment model: d-64-64-k tanh MLP with softmax cross-entropy.
inline ModelSpec default_mlp(int input_dim, int classes, std::uint64_t init_seed = 1) {
    ModelSpec spec;
    spec.widths = {input_dim, 64, 64, classes};
    spec.activations = {Activation::tanh_fn, Activation::tanh_fn, Activation::identity};
    spec.loss = LossKind::softmax_ce;
    spec.init_seed = init_seed;
    return spec;
}

} // namespace samlab
