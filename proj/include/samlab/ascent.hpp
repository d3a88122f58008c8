#pragma once

#include <cstddef>
#include <vector>

#include "samlab/common.hpp"
#include "samlab/objective.hpp"
#include "samlab/vecmath.hpp"

namespace samlab {

/// Ascent hyper-parameters: total radius rho, step count N and per-step
/// radii rho_n (defaulting to rho/N each).
struct AscentConfig {
    double rho = 0.05;
    int steps = 1;
    std::vector<double> step_radii;  // empty means rho/N for every step
    double grad_norm_floor = 1e-12;
    bool renormalize_final = true;

    std::vector<double> resolved_radii() const {
        if (rho < 0.0) throw ConfigError("ascent radius must be >= 0");
        if (steps < 1) throw ConfigError("ascent needs at least one step");
        if (step_radii.empty()) return std::vector<double>(static_cast<std::size_t>(steps), rho / steps);
        if (step_radii.size() != static_cast<std::size_t>(steps))
            throw ConfigError("step_radii length must equal the step count");
        for (double r : step_radii) {
            if (r < 0.0) throw ConfigError("per-step radii must be >= 0");
        }
        return step_radii;
    }
};

/// Result of an N-step ascent from a base weight.
///
/// intermediates[n] is the n+1-th raw trajectory point; intermediate_grads
/// holds the gradients *at* those points. The trajectory construction only
/// produces the first size()-1 of them as by-products; the gradient at the
/// raw endpoint is appended only when the caller asks for it (the modified
/// multi-step descent does, plain SAM does not).
struct AscentTrajectory {
    ParamVector base;
    GradVector base_grad;                        // gradient at the base weight
    std::vector<ParamVector> intermediates;      // raw points after each step
    std::vector<GradVector> intermediate_grads;  // gradients at intermediates
    GradVector direction;                        // unit ascent direction, zero if degenerate
    ParamVector final_perturbed;                 // base + rho * direction (or raw endpoint)
    bool degenerate = false;                     // no usable ascent direction
    bool stopped_early = false;                  // hit a zero gradient mid-trajectory
};

/// One normalized-gradient step of length rho.
inline AscentTrajectory ascent_single(const Objective& obj, const ParamVector& w, double rho,
                                      double grad_norm_floor = 1e-12) {
    if (rho < 0.0) throw ConfigError("ascent radius must be >= 0");
    AscentTrajectory traj;
    traj.base = w;
    traj.base_grad = obj.gradient(w);
    const double gnorm = norm(traj.base_grad);
    if (gnorm <= grad_norm_floor) {
        traj.degenerate = true;
        traj.direction = GradVector(w.size(), 0.0);
        traj.final_perturbed = w;
        return traj;
    }
    traj.direction = normalized_or_zero(traj.base_grad, grad_norm_floor);
    traj.final_perturbed = add_scaled(w, rho, traj.direction);
    traj.intermediates.push_back(traj.final_perturbed);
    return traj;
}

/// N normalized-gradient steps of length rho_n on one batch, then the net
/// displacement is renormalized back to radius rho (when enabled).
///
/// A zero gradient at the base makes the trajectory degenerate; a zero
/// gradient at a later point stops the walk early and uses the trajectory
/// built so far.
inline AscentTrajectory ascent_multi(const Objective& obj, const ParamVector& w, const AscentConfig& cfg,
                                     bool eval_endpoint_grad = false) {
    const std::vector<double> radii = cfg.resolved_radii();
    const double floor = cfg.grad_norm_floor;

    AscentTrajectory traj;
    traj.base = w;
    traj.base_grad = obj.gradient(w);
    const double base_norm = norm(traj.base_grad);
    if (base_norm <= floor) {
        traj.degenerate = true;
        traj.direction = GradVector(w.size(), 0.0);
        traj.final_perturbed = w;
        return traj;
    }
    const GradVector base_unit = normalized_or_zero(traj.base_grad, floor);

    if (cfg.rho == 0.0) {
        // zero-radius fast path: every point collapses onto the base
        traj.direction = base_unit;
        traj.final_perturbed = w;
        traj.intermediates.assign(static_cast<std::size_t>(cfg.steps), w);
        return traj;
    }

    ParamVector current = add_scaled(w, radii[0], base_unit);
    traj.intermediates.push_back(current);
    for (int n = 1; n < cfg.steps; ++n) {
        GradVector g = obj.gradient(current);
        const double gnorm = norm(g);
        if (gnorm <= floor) {
            traj.intermediate_grads.push_back(std::move(g));
            traj.stopped_early = true;
            break;
        }
        const GradVector unit = normalized_or_zero(g, floor);
        traj.intermediate_grads.push_back(std::move(g));
        current = add_scaled(current, radii[static_cast<std::size_t>(n)], unit);
        traj.intermediates.push_back(current);
    }

    const Vec displacement = subtract(traj.intermediates.back(), w);
    const double disp_norm = norm(displacement);
    if (disp_norm <= floor) {
        traj.degenerate = true;
        traj.direction = GradVector(w.size(), 0.0);
        traj.final_perturbed = w;
        return traj;
    }

    // With a single step the displacement is radii[0] * base_unit by
    // construction; reusing base_unit keeps the direction bit-exact.
    traj.direction = traj.intermediates.size() == 1 ? base_unit : normalized_or_zero(displacement, floor);
    traj.final_perturbed =
        cfg.renormalize_final ? add_scaled(w, cfg.rho, traj.direction) : traj.intermediates.back();

    if (eval_endpoint_grad && !traj.stopped_early)
        traj.intermediate_grads.push_back(obj.gradient(traj.intermediates.back()));
    return traj;
}

// (model, params, batch) conveniences

inline AscentTrajectory ascent_single(const ModelSpec& model, const ParamVector& params, const Batch& batch,
                                      double rho) {
    ModelObjective obj(model, batch);
    return ascent_single(obj, params, rho);
}

inline AscentTrajectory ascent_multi(const ModelSpec& model, const ParamVector& params, const Batch& batch,
                                     const AscentConfig& cfg) {
    ModelObjective obj(model, batch);
    return ascent_multi(obj, params, cfg);
}

} // namespace samlab
