#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "samlab/ascent.hpp"
#include "samlab/common.hpp"
#include "samlab/objective.hpp"
#include "samlab/vecmath.hpp"

namespace samlab {

enum class OptKind { sgd, sam, msam };

inline std::string to_string(OptKind k) {
    switch (k) {
        case OptKind::sgd: return "sgd";
        case OptKind::sam: return "sam";
        case OptKind::msam: return "msam";
    }
    return "?";
}

inline OptKind opt_kind_from_string(const std::string& s) {
    if (s == "sgd") return OptKind::sgd;
    if (s == "sam") return OptKind::sam;
    if (s == "msam") return OptKind::msam;
    throw ConfigError("unknown optimizer kind '" + s + "'");
}

struct OptimizerConfig {
    OptKind kind = OptKind::sgd;
    double lr = 0.1;
    AscentConfig ascent;
    std::vector<double> msam_weights;  // empty means uniform 1/N

    std::vector<double> resolved_msam_weights() const {
        const int n = ascent.steps;
        if (msam_weights.empty()) return std::vector<double>(static_cast<std::size_t>(n), 1.0 / n);
        if (msam_weights.size() != static_cast<std::size_t>(n))
            throw ConfigError("msam_weights length must equal the ascent step count");
        double sum = 0.0;
        for (double x : msam_weights) {
            if (x < 0.0) throw ConfigError("msam_weights must be >= 0");
            sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("msam_weights must sum to 1");
        return msam_weights;
    }

    void validate() const {
        if (lr <= 0.0) throw ConfigError("learning rate must be > 0");
        ascent.resolved_radii();
        if (kind == OptKind::msam) resolved_msam_weights();
    }
};

/// The update gradient the descent step will follow. Exposed separately so
/// the training loop can wrap it with momentum.
inline GradVector update_gradient(const Objective& obj, const ParamVector& w, const OptimizerConfig& cfg) {
    switch (cfg.kind) {
        case OptKind::sgd:
            return obj.gradient(w);
        case OptKind::sam: {
            AscentTrajectory traj = ascent_multi(obj, w, cfg.ascent, /*eval_endpoint_grad=*/false);
            if (traj.degenerate || cfg.ascent.rho == 0.0) return traj.base_grad;
            return obj.gradient(traj.final_perturbed);
        }
        case OptKind::msam: {
            AscentTrajectory traj = ascent_multi(obj, w, cfg.ascent, /*eval_endpoint_grad=*/true);
            if (traj.degenerate || cfg.ascent.rho == 0.0) return traj.base_grad;
            std::vector<double> weights = cfg.resolved_msam_weights();
            const std::size_t available = traj.intermediate_grads.size();
            if (available < weights.size()) {
                // early stop: renormalize the weights of the steps actually taken
                double mass = 0.0;
                for (std::size_t n = 0; n < available; ++n) mass += weights[n];
                if (mass <= 0.0) return traj.base_grad;
                for (std::size_t n = 0; n < available; ++n) weights[n] /= mass;
            }
            GradVector update(w.size(), 0.0);
            for (std::size_t n = 0; n < available; ++n)
                axpy(weights[n], traj.intermediate_grads[n], update);
            return update;
        }
    }
    throw ConfigError("unknown optimizer kind");
}

inline ParamVector sgd_step(const Objective& obj, const ParamVector& w, double lr) {
    return add_scaled(w, -lr, obj.gradient(w));
}

/// Descend along the gradient at the perturbed weight (ascent included).
inline ParamVector sam_step(const Objective& obj, const ParamVector& w, const OptimizerConfig& cfg) {
    if (cfg.kind != OptKind::sam) throw ConfigError("sam_step requires kind = sam");
    return add_scaled(w, -cfg.lr, update_gradient(obj, w, cfg));
}

/// Descend along the weighted average of the gradients at every raw
/// trajectory point of the multi-step ascent.
inline ParamVector msam_step(const Objective& obj, const ParamVector& w, const OptimizerConfig& cfg) {
    if (cfg.kind != OptKind::msam) throw ConfigError("msam_step requires kind = msam");
    return add_scaled(w, -cfg.lr, update_gradient(obj, w, cfg));
}

// (model, params, batch) conveniences

inline ParamVector sgd_step(const ModelSpec& model, const ParamVector& params, const Batch& batch, double lr) {
    ModelObjective obj(model, batch);
    return sgd_step(obj, params, lr);
}

inline ParamVector sam_step(const ModelSpec& model, const ParamVector& params, const Batch& batch,
                            const OptimizerConfig& cfg) {
    ModelObjective obj(model, batch);
    return sam_step(obj, params, cfg);
}

inline ParamVector msam_step(const ModelSpec& model, const ParamVector& params, const Batch& batch,
                             const OptimizerConfig& cfg) {
    ModelObjective obj(model, batch);
    return msam_step(obj, params, cfg);
}

} // namespace samlab
