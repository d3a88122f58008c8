#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "samlab/common.hpp"
#include "samlab/model.hpp"
#include "samlab/prng.hpp"
#include "samlab/vecmath.hpp"

namespace samlab {

enum class DataGenerator { gaussian_blobs, two_spirals, noisy_rings, random_regression };

inline std::string to_string(DataGenerator g) {
    switch (g) {
        case DataGenerator::gaussian_blobs: return "gaussian-blobs";
        case DataGenerator::two_spirals: return "two-spirals";
        case DataGenerator::noisy_rings: return "noisy-rings";
        case DataGenerator::random_regression: return "random-regression";
    }
    return "?";
}

inline DataGenerator generator_from_string(const std::string& s) {
    if (s == "gaussian-blobs") return DataGenerator::gaussian_blobs;
    if (s == "two-spirals") return DataGenerator::two_spirals;
    if (s == "noisy-rings") return DataGenerator::noisy_rings;
    if (s == "random-regression") return DataGenerator::random_regression;
    throw ConfigError("unknown dataset generator '" + s + "'");
}

struct DatasetSpec {
    DataGenerator kind = DataGenerator::gaussian_blobs;
    int train_count = 200;
    int test_count = 200;
    double label_noise = 0.0;  // fraction of train labels flipped (classification)
    std::uint64_t seed = 7;
    int input_dim = 2;
    int classes = 2;
};

/// One split: inputs (n x d), targets (n x c one-hot, or n x 1 regression).
struct Split {
    Matrix inputs;
    Matrix targets;
    std::vector<int> labels;  // empty for regression

    int size() const { return inputs.rows; }
};

struct Dataset {
    Split train;
    Split test;
    int classes = 0;       // 0 for regression
    bool regression = false;
};

/// Mini-batch view materialized as dense matrices.
struct Batch {
    Matrix inputs;   // B x d
    Matrix targets;  // B x c
    int index = 0;
    int epoch = 0;
};

inline Batch make_batch(const Split& split, const std::vector<int>& rows, int index = 0, int epoch = 0) {
    Batch batch;
    batch.inputs = Matrix(static_cast<int>(rows.size()), split.inputs.cols);
    batch.targets = Matrix(static_cast<int>(rows.size()), split.targets.cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const int r = rows[i];
        for (int c = 0; c < split.inputs.cols; ++c) batch.inputs.at(static_cast<int>(i), c) = split.inputs.at(r, c);
        for (int c = 0; c < split.targets.cols; ++c) batch.targets.at(static_cast<int>(i), c) = split.targets.at(r, c);
    }
    batch.index = index;
    batch.epoch = epoch;
    return batch;
}

/// First `size` samples of the split in generation order. All landscape
/// analyses default to this batch.
inline Batch first_batch(const Split& split, int size) {
    if (size <= 0 || size > split.size()) throw ConfigError("analysis batch size out of range");
    std::vector<int> rows(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) rows[static_cast<std::size_t>(i)] = i;
    return make_batch(split, rows);
}

/// Whole split as one batch.
inline Batch full_batch(const Split& split) { return first_batch(split, split.size()); }

namespace detail {

inline void validate(const DatasetSpec& spec) {
    if (spec.train_count <= 0 || spec.test_count < 0) throw ConfigError("dataset sample counts must be positive");
    if (spec.label_noise < 0.0 || spec.label_noise >= 1.0) throw ConfigError("label noise rate must lie in [0,1)");
    if (spec.input_dim < 1) throw ConfigError("input dim must be >= 1");
    const bool planar = spec.kind == DataGenerator::two_spirals || spec.kind == DataGenerator::noisy_rings;
    if (planar && spec.input_dim != 2) throw ConfigError(to_string(spec.kind) + " requires input_dim = 2");
    if (spec.kind != DataGenerator::random_regression && spec.classes < 2)
        throw ConfigError("classification needs >= 2 classes");
    if (spec.kind == DataGenerator::two_spirals && spec.classes != 2) throw ConfigError("two-spirals is binary");
}

inline Split generate_classification(const DatasetSpec& spec, int n, Xoshiro256pp& rng) {
    Split split;
    split.inputs = Matrix(n, spec.input_dim);
    split.targets = Matrix(n, spec.classes);
    split.labels.resize(static_cast<std::size_t>(n));
    const int k = spec.classes;

    for (int i = 0; i < n; ++i) {
        const int label = i % k;  // balanced within +/-1 by construction
        split.labels[static_cast<std::size_t>(i)] = label;
        auto row = split.inputs.row(i);
        switch (spec.kind) {
            case DataGenerator::gaussian_blobs: {
                // class centers equally spaced on a circle of radius 3 (first two dims)
                const double angle = 2.0 * std::numbers::pi * label / k;
                const double sigma = 0.6;
                row[0] = 3.0 * std::cos(angle) + sigma * rng.normal();
                if (spec.input_dim > 1) row[1] = 3.0 * std::sin(angle) + sigma * rng.normal();
                for (int d = 2; d < spec.input_dim; ++d) row[static_cast<std::size_t>(d)] = sigma * rng.normal();
                break;
            }
            case DataGenerator::two_spirals: {
                const double t = rng.uniform(0.0, 3.0 * std::numbers::pi);
                const double r = 0.3 + 0.7 * t;
                const double phase = t + label * std::numbers::pi;
                row[0] = 0.45 * r * std::cos(phase) + 0.15 * rng.normal();
                row[1] = 0.45 * r * std::sin(phase) + 0.15 * rng.normal();
                break;
            }
            case DataGenerator::noisy_rings: {
                const double radius = 1.2 * (label + 1) + 0.15 * rng.normal();
                const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
                row[0] = radius * std::cos(angle);
                row[1] = radius * std::sin(angle);
                break;
            }
            case DataGenerator::random_regression: break;  // handled elsewhere
        }
    }
    for (int i = 0; i < n; ++i) split.targets.at(i, split.labels[static_cast<std::size_t>(i)]) = 1.0;
    return split;
}

inline Split generate_regression(const DatasetSpec& spec, int n, Xoshiro256pp& rng, const Vec& coeff_a,
                                 const Vec& coeff_b, double noise_sigma) {
    Split split;
    split.inputs = Matrix(n, spec.input_dim);
    split.targets = Matrix(n, 1);
    for (int i = 0; i < n; ++i) {
        auto row = split.inputs.row(i);
        for (int d = 0; d < spec.input_dim; ++d) row[static_cast<std::size_t>(d)] = rng.normal();
        const double y = std::tanh(dot(row, coeff_a)) + 0.25 * dot(row, coeff_b);
        split.targets.at(i, 0) = y + noise_sigma * rng.normal();
    }
    return split;
}

/// Flip exactly floor(rate*n) labels; indices and replacement labels come
/// from their own stream so the flip set is a pure function of the seed.
inline void apply_label_noise(Split& split, double rate, int classes, std::uint64_t seed) {
    const int n = split.size();
    const int flips = static_cast<int>(std::floor(rate * n));
    if (flips == 0) return;
    Xoshiro256pp rng(seed);
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    rng.shuffle(order);
    for (int f = 0; f < flips; ++f) {
        const int idx = order[static_cast<std::size_t>(f)];
        const int old_label = split.labels[static_cast<std::size_t>(idx)];
        const int shift = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(classes - 1)));
        const int new_label = (old_label + shift) % classes;
        split.labels[static_cast<std::size_t>(idx)] = new_label;
        split.targets.at(idx, old_label) = 0.0;
        split.targets.at(idx, new_label) = 1.0;
    }
}

} // namespace detail

/// Deterministic synthetic dataset. Train and test are drawn from disjoint
/// seed streams; label noise corrupts the training split only.
inline Dataset generate_dataset(const DatasetSpec& spec) {
    detail::validate(spec);
    Dataset ds;
    ds.regression = spec.kind == DataGenerator::random_regression;
    ds.classes = ds.regression ? 0 : spec.classes;

    Xoshiro256pp train_rng(derive_seed(spec.seed, 0xA11CE));
    Xoshiro256pp test_rng(derive_seed(spec.seed, 0xB0B));
    if (ds.regression) {
        Xoshiro256pp teacher(derive_seed(spec.seed, 0x7EAC));
        Vec a(static_cast<std::size_t>(spec.input_dim)), b(static_cast<std::size_t>(spec.input_dim));
        for (auto& x : a) x = teacher.uniform(-2.0, 2.0);
        for (auto& x : b) x = teacher.uniform(-2.0, 2.0);
        // for regression the noise rate acts as an additive sigma on train targets
        ds.train = detail::generate_regression(spec, spec.train_count, train_rng, a, b, spec.label_noise);
        ds.test = detail::generate_regression(spec, spec.test_count, test_rng, a, b, 0.0);
    } else {
        ds.train = detail::generate_classification(spec, spec.train_count, train_rng);
        ds.test = detail::generate_classification(spec, spec.test_count, test_rng);
        detail::apply_label_noise(ds.train, spec.label_noise, spec.classes, derive_seed(spec.seed, 0xF11B));
    }
    return ds;
}

/// Epoch-wise seeded batching: each epoch is one permutation of the split,
/// chopped into batch_size pieces with the short remainder kept.
class BatchIterator {
  public:
    BatchIterator(const Split& split, int batch_size, std::uint64_t shuffle_seed)
        : split_(&split), batch_size_(batch_size), seed_(shuffle_seed) {
        if (batch_size <= 0) throw ConfigError("batch size must be positive");
        if (batch_size > split.size()) throw ConfigError("batch size exceeds dataset size");
        start_epoch(0);
    }

    int batches_per_epoch() const { return (split_->size() + batch_size_ - 1) / batch_size_; }

    void start_epoch(int epoch) {
        epoch_ = epoch;
        cursor_ = 0;
        perm_ = seeded_permutation(split_->size(), derive_seed(seed_, static_cast<std::uint64_t>(epoch)));
    }

    /// Next batch; rolls into the following epoch after the last one.
    Batch next() {
        if (cursor_ >= split_->size()) start_epoch(epoch_ + 1);
        const int begin = cursor_;
        const int end = std::min(begin + batch_size_, split_->size());
        std::vector<int> rows(perm_.begin() + begin, perm_.begin() + end);
        cursor_ = end;
        return make_batch(*split_, rows, begin / batch_size_, epoch_);
    }

  private:
    const Split* split_;
    int batch_size_;
    std::uint64_t seed_;
    int epoch_ = 0;
    int cursor_ = 0;
    std::vector<int> perm_;
};

} // namespace samlab
