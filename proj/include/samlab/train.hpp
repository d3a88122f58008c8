#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "samlab/autodiff.hpp"
#include "samlab/common.hpp"
#include "samlab/dataset.hpp"
#include "samlab/model.hpp"
#include "samlab/optimizer.hpp"
#include "samlab/vecmath.hpp"

namespace samlab {

enum class LrSchedule { constant, cosine };

inline std::string to_string(LrSchedule s) { return s == LrSchedule::constant ? "constant" : "cosine"; }

inline LrSchedule schedule_from_string(const std::string& s) {
    if (s == "constant") return LrSchedule::constant;
    if (s == "cosine") return LrSchedule::cosine;
    throw ConfigError("unknown lr schedule '" + s + "'");
}

struct TrainOptions {
    int epochs = 50;
    int batch_size = 32;
    LrSchedule schedule = LrSchedule::constant;
    double momentum = 0.0;  // heavy-ball on the update direction
};

struct MetricRow {
    int epoch;
    std::string split;  // "train" | "test"
    double loss;
    double accuracy;  // NaN for regression
};

struct SplitMetrics {
    double loss = 0.0;
    double accuracy = std::numeric_limits<double>::quiet_NaN();
};

struct TrainedModel {
    ModelSpec model;
    ParamVector params;
};

struct TrainResult {
    ParamVector params;
    std::vector<MetricRow> log;
    long steps = 0;
    EvalCounts counts;
    bool aborted = false;
    int abort_epoch = -1;
    int abort_batch = -1;
    std::string abort_reason;
};

/// Loss and (for classification) accuracy of the model on a whole split.
inline SplitMetrics evaluate(const ModelSpec& model, const ParamVector& params, const Split& split) {
    SplitMetrics m;
    const Batch batch = full_batch(split);
    CompGraph graph(model, params, batch);
    m.loss = graph.forward();
    if (!split.labels.empty()) {
        const Matrix x = forward_outputs(model, params, batch.inputs);
        int hits = 0;
        for (int r = 0; r < x.rows; ++r) {
            int best = 0;
            for (int c = 1; c < x.cols; ++c)
                if (x.at(r, c) > x.at(r, best)) best = c;
            if (best == split.labels[static_cast<std::size_t>(r)]) ++hits;
        }
        m.accuracy = static_cast<double>(hits) / x.rows;
    }
    return m;
}

inline double scheduled_lr(double base_lr, LrSchedule schedule, int epoch, int total_epochs) {
    if (schedule == LrSchedule::constant || total_epochs <= 0) return base_lr;
    return base_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * epoch / total_epochs));
}

/// Seed-deterministic training loop. Per-epoch train/test metrics are
/// logged after each epoch; a non-finite loss or parameter aborts the run
/// with the offending batch recorded.
inline TrainResult train(const ModelSpec& model, const Dataset& data, const OptimizerConfig& opt,
                         const TrainOptions& options, std::uint64_t shuffle_seed) {
    validate(model);
    opt.validate();
    if (options.epochs < 0) throw ConfigError("epochs must be >= 0");

    TrainResult result;
    result.params = init_params(model);
    if (options.epochs == 0) return result;
    if (data.test.size() == 0) throw ConfigError("training needs a non-empty test split");

    BatchIterator batches(data.train, options.batch_size, shuffle_seed);
    GradVector velocity(result.params.size(), 0.0);

    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        const double lr = scheduled_lr(opt.lr, options.schedule, epoch, options.epochs);
        batches.start_epoch(epoch);
        for (int b = 0; b < batches.batches_per_epoch(); ++b) {
            const Batch batch = batches.next();
            ModelObjective obj(model, batch);
            GradVector update = update_gradient(obj, result.params, opt);
            if (options.momentum != 0.0) {
                for (std::size_t i = 0; i < velocity.size(); ++i)
                    velocity[i] = options.momentum * velocity[i] + update[i];
            } else {
                velocity = update;
            }
            axpy(-lr, velocity, result.params);
            ++result.steps;
            const EvalCounts c = obj.counts();
            result.counts.values += c.values;
            result.counts.gradients += c.gradients;
            if (!all_finite(result.params)) {
                result.aborted = true;
                result.abort_epoch = epoch;
                result.abort_batch = batch.index;
                result.abort_reason = "non-finite parameters after optimizer step";
                return result;
            }
        }
        const SplitMetrics train_m = evaluate(model, result.params, data.train);
        const SplitMetrics test_m = evaluate(model, result.params, data.test);
        if (!std::isfinite(train_m.loss)) {
            result.aborted = true;
            result.abort_epoch = epoch;
            result.abort_batch = -1;
            result.abort_reason = "non-finite training loss";
            return result;
        }
        result.log.push_back({epoch, "train", train_m.loss, train_m.accuracy});
        result.log.push_back({epoch, "test", test_m.loss, test_m.accuracy});
    }
    return result;
}

} // namespace samlab
