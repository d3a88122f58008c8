#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "samlab/common.hpp"
#include "samlab/objective.hpp"
#include "samlab/vecmath.hpp"

namespace samlab {

/// Exhaustive estimate of max_{|u|=1} l(w + rho u).
struct InnerMaxResult {
    double max_loss = 0.0;
    Vec argmax_direction;
    long evaluations = 0;
    double grid_spacing = 0.0;  // radians between neighbouring grid directions
};

/// Sweep a uniform angular grid over the radius-rho sphere and return the
/// best cell. Only feasible for tiny parameter counts, so anything above
/// three parameters is refused.
inline InnerMaxResult bruteforce_inner_max(const Objective& obj, const ParamVector& w, double rho,
                                           int resolution) {
    const int p = static_cast<int>(w.size());
    if (p < 1 || p > 3)
        throw ConfigError("bruteforce_inner_max: exhaustive sphere search handles at most 3 parameters (got " +
                          std::to_string(p) + "); use the ascent operators for larger models");
    if (rho < 0.0) throw ConfigError("bruteforce_inner_max: rho must be >= 0");
    if (resolution < 2) throw ConfigError("bruteforce_inner_max: resolution must be >= 2");

    InnerMaxResult result;
    result.max_loss = -std::numeric_limits<double>::infinity();

    auto consider = [&](const Vec& u) {
        const double loss = obj.value(add_scaled(w, rho, u));
        ++result.evaluations;
        if (loss > result.max_loss) {
            result.max_loss = loss;
            result.argmax_direction = u;
        }
    };

    switch (p) {
        case 1: {
            consider(Vec{1.0});
            consider(Vec{-1.0});
            result.grid_spacing = std::numbers::pi;
            break;
        }
        case 2: {
            for (int i = 0; i < resolution; ++i) {
                const double theta = 2.0 * std::numbers::pi * i / resolution;
                consider(Vec{std::cos(theta), std::sin(theta)});
            }
            result.grid_spacing = 2.0 * std::numbers::pi / resolution;
            break;
        }
        case 3: {
            for (int i = 0; i < resolution; ++i) {
                const double theta = 2.0 * std::numbers::pi * i / resolution;
                for (int j = 0; j < resolution; ++j) {
                    const double phi = std::numbers::pi * (j + 0.5) / resolution;
                    consider(Vec{std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta), std::cos(phi)});
                }
            }
            result.grid_spacing = 2.0 * std::numbers::pi / resolution;
            break;
        }
    }
    return result;
}

} // namespace samlab
