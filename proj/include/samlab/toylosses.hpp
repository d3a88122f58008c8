#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "samlab/common.hpp"
#include "samlab/objective.hpp"

namespace samlab {

// Closed-form two-parameter losses. They drive the brute-force inner-max
// oracle from the CLI and serve as ground truth wherever the exhaustive
// sphere search validates the ascent operators.

inline std::vector<std::string> toy_loss_names() {
    return {"rosenbrock", "logsumexp", "quartic_ring", "exp_bowl", "trig_bowl", "cosh_well"};
}

inline std::unique_ptr<AnalyticObjective> make_toy_loss(const std::string& name) {
    if (name == "rosenbrock") {
        return std::make_unique<AnalyticObjective>(
            2,
            [](std::span<const double> w) {
                const double a = w[0], b = w[1];
                return (1.0 - a) * (1.0 - a) + 100.0 * (b - a * a) * (b - a * a);
            },
            [](std::span<const double> w) {
                const double a = w[0], b = w[1];
                return GradVector{-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)};
            });
    }
    if (name == "logsumexp") {
        return std::make_unique<AnalyticObjective>(
            2,
            [](std::span<const double> w) {
                const double a = w[0], b = w[1];
                return std::log(std::exp(2.0 * a + b) + std::exp(-a + 2.0 * b) + std::exp(-a - b));
            },
            [](std::span<const double> w) {
                const double a = w[0], b = w[1];
                const double e1 = std::exp(2.0 * a + b), e2 = std::exp(-a + 2.0 * b), e3 = std::exp(-a - b);
                const double z = e1 + e2 + e3;
                return GradVector{(2.0 * e1 - e2 - e3) / z, (e1 + 2.0 * e2 - e3) / z};
            });
    }
    if (name == "quartic_ring") {
        return std::make_unique<AnalyticObjective>(
            2,
            [](std::span<const double> w) {
                const double r = w[0] * w[0] + w[1] * w[1] - 1.0;
                return r * r + 0.5 * w[0];
            },
            [](std::span<const double> w) {
                const double r = w[0] * w[0] + w[1] * w[1] - 1.0;
                return GradVector{4.0 * w[0] * r + 0.5, 4.0 * w[1] * r};
            });
    }
    if (name == "exp_bowl") {
        return std::make_unique<AnalyticObjective>(
            2,
            [](std::span<const double> w) {
                const double a = w[0], b = w[1];
                return std::exp(a) + std::exp(-2.0 * b) + a * a * b * b;
            },
            [](std::span<const double> w) {
                const double a = w[0], b = w[1];
                return GradVector{std::exp(a) + 2.0 * a * b * b, -2.0 * std::exp(-2.0 * b) + 2.0 * a * a * b};
            });
    }
    if (name == "trig_bowl") {
        return std::make_unique<AnalyticObjective>(
            2,
            [](std::span<const double> w) {
                const double a = w[0], b = w[1];
                return std::sin(3.0 * a) * std::cos(2.0 * b) + 0.5 * (a * a + b * b);
            },
            [](std::span<const double> w) {
                const double a = w[0], b = w[1];
                return GradVector{3.0 * std::cos(3.0 * a) * std::cos(2.0 * b) + a,
                                  -2.0 * std::sin(3.0 * a) * std::sin(2.0 * b) + b};
            });
    }
    if (name == "cosh_well") {
        return std::make_unique<AnalyticObjective>(
            2,
            [](std::span<const double> w) {
                const double a = w[0], b = w[1];
                return std::cosh(a - b) + 0.25 * (a + b) * (a + b);
            },
            [](std::span<const double> w) {
                const double a = w[0], b = w[1];
                return GradVector{std::sinh(a - b) + 0.5 * (a + b), -std::sinh(a - b) + 0.5 * (a + b)};
            });
    }
    std::string names;
    for (const auto& n : toy_loss_names()) names += (names.empty() ? "" : ", ") + n;
    throw ConfigError("unknown toy loss '" + name + "'; valid names: " + names);
}

} // namespace samlab
