#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "samlab/ascent.hpp"
#include "samlab/common.hpp"
#include "samlab/dataset.hpp"
#include "samlab/objective.hpp"
#include "samlab/train.hpp"
#include "samlab/vecmath.hpp"

namespace samlab {

// Landscape measurements around a fixed weight on a fixed batch: losses
// along ascent rays, over 2-D slices, gradient cosine matrices, realized
// loss decreases and whole-training-set perturbed-loss tables.

/// Losses along base + k * v_N for a grid of scales k.
struct RayProbe {
    int ascent_steps = 1;
    std::vector<double> scale_grid;
    std::vector<double> losses;
};

inline RayProbe ray_probe(const Objective& obj, const ParamVector& w, const AscentConfig& cfg,
                          std::span<const double> scale_grid) {
    for (std::size_t i = 1; i < scale_grid.size(); ++i)
        if (scale_grid[i] <= scale_grid[i - 1]) throw ConfigError("ray probe scale grid must be strictly increasing");
    const AscentTrajectory traj = ascent_multi(obj, w, cfg);
    if (traj.degenerate)
        throw NumericError("ray probe: ascent direction is degenerate (zero gradient at the base weight)");
    RayProbe probe;
    probe.ascent_steps = cfg.steps;
    probe.scale_grid.assign(scale_grid.begin(), scale_grid.end());
    probe.losses.reserve(scale_grid.size());
    for (double k : scale_grid) probe.losses.push_back(obj.value(add_scaled(w, k, traj.direction)));
    return probe;
}

/// Default ray grid: 21 points covering [0, 2 rho].
inline std::vector<double> default_ray_grid(double rho) {
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(2.0 * rho * i / 20.0);
    return grid;
}

/// Loss surface over w + x * dir_a + y * dir_b.
struct GridProbe {
    Vec dir_a, dir_b;
    std::vector<double> x_grid, y_grid;
    Matrix losses;  // |x_grid| rows, |y_grid| cols
    bool normalized_a = false;  // set when a non-unit direction was rescaled
    bool normalized_b = false;
    int argmax_x = 0, argmax_y = 0;
    double max_loss = 0.0;
};

inline GridProbe grid_probe(const Objective& obj, const ParamVector& w, std::span<const double> dir_a,
                            std::span<const double> dir_b, std::span<const double> x_grid,
                            std::span<const double> y_grid) {
    if (x_grid.empty() || y_grid.empty()) throw ConfigError("grid probe needs non-empty scale grids");
    GridProbe probe;
    probe.dir_a.assign(dir_a.begin(), dir_a.end());
    probe.dir_b.assign(dir_b.begin(), dir_b.end());
    const double na = norm(dir_a);
    const double nb = norm(dir_b);
    if (na <= 0.0 || nb <= 0.0) throw NumericError("grid probe: zero direction");
    if (std::abs(na - 1.0) > 1e-9) {
        probe.dir_a = normalized_or_zero(dir_a, 0.0);
        probe.normalized_a = true;
    }
    if (std::abs(nb - 1.0) > 1e-9) {
        probe.dir_b = normalized_or_zero(dir_b, 0.0);
        probe.normalized_b = true;
    }
    probe.x_grid.assign(x_grid.begin(), x_grid.end());
    probe.y_grid.assign(y_grid.begin(), y_grid.end());
    probe.losses = Matrix(static_cast<int>(x_grid.size()), static_cast<int>(y_grid.size()));
    probe.max_loss = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        const Vec along_a = add_scaled(w, probe.x_grid[i], probe.dir_a);
        for (std::size_t j = 0; j < y_grid.size(); ++j) {
            const double loss = obj.value(add_scaled(along_a, probe.y_grid[j], probe.dir_b));
            probe.losses.at(static_cast<int>(i), static_cast<int>(j)) = loss;
            if (loss > probe.max_loss) {
                probe.max_loss = loss;
                probe.argmax_x = static_cast<int>(i);
                probe.argmax_y = static_cast<int>(j);
            }
        }
    }
    return probe;
}

inline std::vector<double> symmetric_grid(double half_width, int points = 41) {
    std::vector<double> grid;
    for (int i = 0; i < points; ++i) grid.push_back(-half_width + 2.0 * half_width * i / (points - 1));
    return grid;
}

/// Pairwise cosine similarities between the gradient at the base weight
/// (label p_0) and the gradients at the perturbed weights w^{p_N} for
/// N = 1..K, all on one batch.
struct CosineMatrix {
    int max_steps = 0;
    Matrix values;                     // (K+1) x (K+1)
    std::vector<std::uint8_t> defined; // row-major mask; 0 marks undefined entries
    std::vector<std::string> labels;

    bool entry_defined(int i, int j) const {
        return defined[static_cast<std::size_t>(i) * static_cast<std::size_t>(values.cols) + j] != 0;
    }
};

inline CosineMatrix cosine_matrix(const Objective& obj, const ParamVector& w, int max_steps, double rho,
                                  double grad_norm_floor = 1e-12) {
    if (max_steps < 1) throw ConfigError("cosine matrix needs max_steps >= 1");
    CosineMatrix cm;
    cm.max_steps = max_steps;
    const int size = max_steps + 1;
    cm.values = Matrix(size, size);
    cm.defined.assign(static_cast<std::size_t>(size) * size, 1);

    std::vector<GradVector> grads;
    grads.push_back(obj.gradient(w));  // p_0 = unperturbed
    for (int n = 1; n <= max_steps; ++n) {
        AscentConfig cfg;
        cfg.rho = rho;
        cfg.steps = n;
        cfg.grad_norm_floor = grad_norm_floor;
        const AscentTrajectory traj = ascent_multi(obj, w, cfg);
        if (traj.degenerate)
            grads.push_back(GradVector(w.size(), 0.0));
        else
            grads.push_back(obj.gradient(traj.final_perturbed));
    }
    for (int i = 0; i < size; ++i) cm.labels.push_back("p" + std::to_string(i));

    for (int i = 0; i < size; ++i) {
        for (int j = i; j < size; ++j) {
            const bool ok = norm(grads[static_cast<std::size_t>(i)]) > grad_norm_floor &&
                            norm(grads[static_cast<std::size_t>(j)]) > grad_norm_floor;
            double c = 0.0;
            if (ok)
                c = i == j ? 1.0 : cosine_similarity(grads[static_cast<std::size_t>(i)],
                                                     grads[static_cast<std::size_t>(j)]);
            cm.values.at(i, j) = c;
            cm.values.at(j, i) = c;
            if (!ok) {
                cm.defined[static_cast<std::size_t>(i) * size + j] = 0;
                cm.defined[static_cast<std::size_t>(j) * size + i] = 0;
            }
        }
    }
    return cm;
}

/// Realized loss decreases: delta(theta; g) = l(theta) - l(theta - lr * g)
/// for every (evaluation point, update gradient) pair.
struct DecreaseMatrix {
    std::vector<std::string> point_labels;
    std::vector<std::string> grad_labels;
    double lr = 0.1;
    Matrix delta;  // points x gradients
};

struct LabeledPoint {
    std::string label;
    ParamVector point;
};

struct LabeledGrad {
    std::string label;
    GradVector grad;
};

inline DecreaseMatrix decrease_matrix(const Objective& obj, const std::vector<LabeledPoint>& points,
                                      const std::vector<LabeledGrad>& grads, double lr) {
    if (lr <= 0.0) throw ConfigError("decrease matrix needs lr > 0");
    DecreaseMatrix dm;
    dm.lr = lr;
    dm.delta = Matrix(static_cast<int>(points.size()), static_cast<int>(grads.size()));
    for (const auto& p : points) dm.point_labels.push_back(p.label);
    for (const auto& g : grads) dm.grad_labels.push_back(g.label);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double base_loss = obj.value(points[i].point);
        for (std::size_t j = 0; j < grads.size(); ++j) {
            const double stepped = obj.value(add_scaled(points[i].point, -lr, grads[j].grad));
            dm.delta.at(static_cast<int>(i), static_cast<int>(j)) = base_loss - stepped;
        }
    }
    return dm;
}

/// Points interpolating linearly between two weights (inclusive endpoints).
inline std::vector<LabeledPoint> interpolated_points(const ParamVector& from, const ParamVector& to,
                                                     int count, const std::string& prefix) {
    if (count < 2) throw ConfigError("interpolation needs at least two points");
    std::vector<LabeledPoint> points;
    for (int i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / (count - 1);
        Vec p(from.size());
        for (std::size_t k = 0; k < from.size(); ++k) p[k] = (1.0 - t) * from[k] + t * to[k];
        points.push_back({prefix + std::to_string(i), std::move(p)});
    }
    return points;
}

/// Mean perturbed loss l(w^{p_N}) over a whole split, batch by batch: the
/// trajectory is rebuilt on every batch, mirroring how training sees data.
inline double mean_perturbed_loss(const ModelSpec& model, const ParamVector& params, const Split& split,
                                  int batch_size, double rho, int steps) {
    const int n = split.size();
    if (batch_size <= 0 || batch_size > n) throw ConfigError("perturbed loss eval: bad batch size");
    double acc = 0.0;
    int batches = 0;
    for (int begin = 0; begin < n; begin += batch_size) {
        const int end = std::min(begin + batch_size, n);
        std::vector<int> rows;
        for (int r = begin; r < end; ++r) rows.push_back(r);
        const Batch batch = make_batch(split, rows, batches);
        ModelObjective obj(model, batch);
        if (rho == 0.0 || steps == 0) {
            acc += obj.value(params);
        } else {
            AscentConfig cfg;
            cfg.rho = rho;
            cfg.steps = steps;
            const AscentTrajectory traj = ascent_multi(obj, params, cfg);
            acc += obj.value(traj.degenerate ? params : traj.final_perturbed);
        }
        ++batches;
    }
    return acc / batches;
}

/// One table row group: several seed-replicates of the same training method.
struct ModelGroup {
    std::string label;
    std::vector<TrainedModel> seed_models;
};

struct PerturbedLossTable {
    std::vector<int> steps_list;
    std::vector<std::string> row_labels;
    // per row: mean/std of the unperturbed loss, then mean/std per N
    std::vector<double> base_mean, base_std;
    Matrix mean_by_steps;  // rows x |steps_list|
    Matrix std_by_steps;
    // per row and N: the raw per-seed values, kept for pairwise trend checks
    std::vector<std::vector<std::vector<double>>> per_seed;  // [row][n_idx][seed]
};

namespace detail {

inline void mean_std(const std::vector<double>& xs, double& mean, double& stdev) {
    mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    stdev = xs.size() > 1 ? std::sqrt(var / static_cast<double>(xs.size() - 1)) : 0.0;
}

} // namespace detail

/// Mean +/- std (across seed models) of the unperturbed and N-step
/// perturbed losses over the full training split.
inline PerturbedLossTable perturbed_loss_table(const std::vector<ModelGroup>& groups, const Split& train_split,
                                               int batch_size, double rho, std::span<const int> steps_list) {
    if (groups.empty()) throw ConfigError("perturbed loss table needs at least one model group");
    const auto& ref_widths = groups.front().seed_models.front().model.widths;
    for (const auto& g : groups)
        for (const auto& m : g.seed_models)
            if (m.model.widths != ref_widths) throw ConfigError("perturbed loss table: architecture mismatch");

    PerturbedLossTable table;
    table.steps_list.assign(steps_list.begin(), steps_list.end());
    table.mean_by_steps = Matrix(static_cast<int>(groups.size()), static_cast<int>(steps_list.size()));
    table.std_by_steps = Matrix(static_cast<int>(groups.size()), static_cast<int>(steps_list.size()));

    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const auto& group = groups[gi];
        table.row_labels.push_back(group.label);
        std::vector<double> base_vals;
        for (const auto& m : group.seed_models)
            base_vals.push_back(mean_perturbed_loss(m.model, m.params, train_split, batch_size, 0.0, 0));
        double mean = 0.0, stdev = 0.0;
        detail::mean_std(base_vals, mean, stdev);
        table.base_mean.push_back(mean);
        table.base_std.push_back(stdev);

        std::vector<std::vector<double>> row_per_seed;
        for (std::size_t ni = 0; ni < steps_list.size(); ++ni) {
            std::vector<double> vals;
            for (const auto& m : group.seed_models)
                vals.push_back(
                    mean_perturbed_loss(m.model, m.params, train_split, batch_size, rho, steps_list[ni]));
            detail::mean_std(vals, mean, stdev);
            table.mean_by_steps.at(static_cast<int>(gi), static_cast<int>(ni)) = mean;
            table.std_by_steps.at(static_cast<int>(gi), static_cast<int>(ni)) = stdev;
            row_per_seed.push_back(std::move(vals));
        }
        table.per_seed.push_back(std::move(row_per_seed));
    }
    return table;
}

} // namespace samlab
