#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "samlab/common.hpp"
#include "samlab/config.hpp"
#include "samlab/csv.hpp"
#include "samlab/dataset.hpp"
#include "samlab/landscape.hpp"
#include "samlab/spectrum.hpp"
#include "samlab/train.hpp"

namespace samlab {

constexpr int kCheckpointVersion = 1;

/// A trained model plus everything needed to rebuild its data and the
/// canonical analysis batch (the first training mini-batch).
struct Checkpoint {
    ModelSpec model;
    ParamVector params;
    DatasetSpec data;
    int batch_size = 32;
    std::uint64_t run_seed = 0;
    double analysis_batch_loss = 0.0;  // loss of params on the analysis batch
    double final_train_loss = 0.0;
    double final_test_loss = 0.0;
    double final_test_accuracy = 0.0;
};

inline void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    json j;
    j["version"] = kCheckpointVersion;
    j["model"] = to_json(ckpt.model);
    j["data"] = to_json(ckpt.data);
    j["batch_size"] = ckpt.batch_size;
    j["run_seed"] = ckpt.run_seed;
    j["analysis_batch_loss"] = ckpt.analysis_batch_loss;
    j["final_train_loss"] = ckpt.final_train_loss;
    j["final_test_loss"] = ckpt.final_test_loss;
    j["final_test_accuracy"] = ckpt.final_test_accuracy;
    // exact round-trip: shortest strings that reparse to identical doubles
    json params = json::array();
    for (double v : ckpt.params) params.push_back(format_double(v));
    j["params"] = params;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint '" + path + "'");
    out << j.dump(2) << "\n";
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw IoError("checkpoint '" + path + "': " + e.what());
    }
    if (!j.contains("version") || j.at("version").get<int>() != kCheckpointVersion)
        throw ConfigError("checkpoint '" + path + "' has an unsupported version");
    Checkpoint ckpt;
    ckpt.model = model_from_json(j.at("model"));
    ckpt.data = dataset_from_json(j.at("data"));
    ckpt.batch_size = j.at("batch_size").get<int>();
    ckpt.run_seed = j.at("run_seed").get<std::uint64_t>();
    ckpt.analysis_batch_loss = j.at("analysis_batch_loss").get<double>();
    ckpt.final_train_loss = j.at("final_train_loss").get<double>();
    ckpt.final_test_loss = j.at("final_test_loss").get<double>();
    ckpt.final_test_accuracy = j.at("final_test_accuracy").get<double>();
    for (const auto& v : j.at("params")) ckpt.params.push_back(parse_double(v.get<std::string>()));
    if (static_cast<int>(ckpt.params.size()) != param_count(ckpt.model))
        throw ConfigError("checkpoint '" + path + "': parameter count does not match the model");
    return ckpt;
}

inline void write_metrics_csv(const std::vector<MetricRow>& log, const std::string& path) {
    CsvWriter csv(path);
    csv.row({"epoch", "split", "loss", "accuracy"});
    for (const auto& row : log)
        csv.row({std::to_string(row.epoch), row.split, format_double(row.loss), format_double(row.accuracy)});
}

/// Dataset CSV: x0..x{d-1},label. Classification labels are ints;
/// regression targets are written as the label column.
inline void export_split_csv(const Split& split, const std::string& path) {
    CsvWriter csv(path);
    std::vector<std::string> header;
    for (int d = 0; d < split.inputs.cols; ++d) header.push_back("x" + std::to_string(d));
    header.push_back("label");
    csv.row(header);
    for (int r = 0; r < split.size(); ++r) {
        std::vector<std::string> cells;
        for (int d = 0; d < split.inputs.cols; ++d) cells.push_back(format_double(split.inputs.at(r, d)));
        if (!split.labels.empty())
            cells.push_back(std::to_string(split.labels[static_cast<std::size_t>(r)]));
        else
            cells.push_back(format_double(split.targets.at(r, 0)));
        csv.row(cells);
    }
}

/// Inverse of export_split_csv, for inspection round-trips.
inline Split import_split_csv(const std::string& path, bool regression, int classes) {
    const auto rows = read_csv(path);
    if (rows.size() < 2) throw IoError("dataset csv '" + path + "' has no data rows");
    const int d = static_cast<int>(rows[0].size()) - 1;
    const int n = static_cast<int>(rows.size()) - 1;
    Split split;
    split.inputs = Matrix(n, d);
    split.targets = Matrix(n, regression ? 1 : classes);
    if (!regression) split.labels.resize(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
        const auto& cells = rows[static_cast<std::size_t>(r) + 1];
        if (static_cast<int>(cells.size()) != d + 1) throw IoError("dataset csv '" + path + "': ragged row");
        for (int c = 0; c < d; ++c) split.inputs.at(r, c) = parse_double(cells[static_cast<std::size_t>(c)]);
        if (regression) {
            split.targets.at(r, 0) = parse_double(cells[static_cast<std::size_t>(d)]);
        } else {
            const int label = static_cast<int>(std::stol(cells[static_cast<std::size_t>(d)]));
            split.labels[static_cast<std::size_t>(r)] = label;
            split.targets.at(r, label) = 1.0;
        }
    }
    return split;
}

// --- probe report writers -------------------------------------------------

inline void write_ray_csv(const RayProbe& probe, const std::string& path) {
    CsvWriter csv(path);
    csv.row({"n_steps", "k", "loss"});
    for (std::size_t i = 0; i < probe.scale_grid.size(); ++i)
        csv.row({std::to_string(probe.ascent_steps), format_double(probe.scale_grid[i]),
                 format_double(probe.losses[i])});
}

inline void write_rays_csv(const std::vector<RayProbe>& probes, const std::string& path) {
    CsvWriter csv(path);
    csv.row({"n_steps", "k", "loss"});
    for (const auto& probe : probes)
        for (std::size_t i = 0; i < probe.scale_grid.size(); ++i)
            csv.row({std::to_string(probe.ascent_steps), format_double(probe.scale_grid[i]),
                     format_double(probe.losses[i])});
}

inline void write_grid_csv(const GridProbe& probe, const std::string& path) {
    CsvWriter csv(path);
    csv.row({"x", "y", "loss"});
    for (std::size_t i = 0; i < probe.x_grid.size(); ++i)
        for (std::size_t j = 0; j < probe.y_grid.size(); ++j)
            csv.row({format_double(probe.x_grid[i]), format_double(probe.y_grid[j]),
                     format_double(probe.losses.at(static_cast<int>(i), static_cast<int>(j)))});
}

inline void write_grid_summary_csv(const GridProbe& probe, const std::string& path) {
    CsvWriter csv(path);
    csv.row({"argmax_x", "argmax_y", "max_loss", "normalized_a", "normalized_b"});
    csv.row({format_double(probe.x_grid[static_cast<std::size_t>(probe.argmax_x)]),
             format_double(probe.y_grid[static_cast<std::size_t>(probe.argmax_y)]),
             format_double(probe.max_loss), probe.normalized_a ? "1" : "0", probe.normalized_b ? "1" : "0"});
}

/// Cosine matrix rows are labelled; undefined entries (zero gradients)
/// appear as the marker "undef".
inline void write_cosine_csv(const CosineMatrix& cm, const std::string& path) {
    CsvWriter csv(path);
    std::vector<std::string> header = {"label"};
    header.insert(header.end(), cm.labels.begin(), cm.labels.end());
    csv.row(header);
    for (int i = 0; i < cm.values.rows; ++i) {
        std::vector<std::string> cells = {cm.labels[static_cast<std::size_t>(i)]};
        for (int j = 0; j < cm.values.cols; ++j)
            cells.push_back(cm.entry_defined(i, j) ? format_double(cm.values.at(i, j)) : "undef");
        csv.row(cells);
    }
}

inline void write_decrease_csv(const DecreaseMatrix& dm, const std::string& path) {
    CsvWriter csv(path);
    std::vector<std::string> header = {"point"};
    header.insert(header.end(), dm.grad_labels.begin(), dm.grad_labels.end());
    csv.row(header);
    for (int i = 0; i < dm.delta.rows; ++i) {
        std::vector<std::string> cells = {dm.point_labels[static_cast<std::size_t>(i)]};
        for (int j = 0; j < dm.delta.cols; ++j) cells.push_back(format_double(dm.delta.at(i, j)));
        csv.row(cells);
    }
}

inline void write_spectrum_csv(const SpectrumReport& report, const std::string& path) {
    CsvWriter csv(path);
    csv.row({"rank", "eigenvalue", "iterations", "residual", "converged"});
    for (std::size_t k = 0; k < report.eigenvalues.size(); ++k) {
        const auto& e = report.eigenvalues[k];
        csv.row({std::to_string(k + 1), format_double(e.value), std::to_string(e.iterations),
                 format_double(e.residual), e.converged ? "1" : "0"});
    }
}

inline void write_perturbed_table_csv(const PerturbedLossTable& table, const std::string& path) {
    CsvWriter csv(path);
    std::vector<std::string> header = {"method", "loss_mean", "loss_std"};
    for (int n : table.steps_list) {
        header.push_back("perturbed_n" + std::to_string(n) + "_mean");
        header.push_back("perturbed_n" + std::to_string(n) + "_std");
    }
    csv.row(header);
    for (std::size_t r = 0; r < table.row_labels.size(); ++r) {
        std::vector<std::string> cells = {table.row_labels[r], format_double(table.base_mean[r]),
                                          format_double(table.base_std[r])};
        for (std::size_t n = 0; n < table.steps_list.size(); ++n) {
            cells.push_back(format_double(table.mean_by_steps.at(static_cast<int>(r), static_cast<int>(n))));
            cells.push_back(format_double(table.std_by_steps.at(static_cast<int>(r), static_cast<int>(n))));
        }
        csv.row(cells);
    }
}

} // namespace samlab
