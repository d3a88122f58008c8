#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "samlab/bruteforce.hpp"
#include "samlab/common.hpp"
#include "samlab/config.hpp"
#include "samlab/csv.hpp"
#include "samlab/landscape.hpp"
#include "samlab/manifest.hpp"
#include "samlab/persist.hpp"
#include "samlab/prng.hpp"
#include "samlab/spectrum.hpp"
#include "samlab/svg.hpp"
#include "samlab/toylosses.hpp"
#include "samlab/train.hpp"

namespace samlab {

namespace fs = std::filesystem;

enum class EmitFormat { csv, csv_svg };

inline EmitFormat format_from_string(const std::string& s) {
    if (s == "csv") return EmitFormat::csv;
    if (s == "csv+svg") return EmitFormat::csv_svg;
    throw ConfigError("unknown format '" + s + "' (expected csv or csv+svg)");
}

namespace exp_detail {

inline void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");
    // probe writability early so failures carry a clear message
    const fs::path probe = dir / ".samlab_write_probe";
    {
        std::ofstream out(probe);
        if (!out) throw IoError("output directory '" + dir.string() + "' is not writable");
    }
    fs::remove(probe, ec);
}

inline void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << text;
}

/// Per-run-seed derived streams: one for the init, one for batch shuffling.
inline std::uint64_t init_seed_for(std::uint64_t run_seed) { return derive_seed(run_seed, 1); }
inline std::uint64_t shuffle_seed_for(std::uint64_t run_seed) { return derive_seed(run_seed, 2); }

struct SeedRun {
    std::uint64_t seed;
    TrainResult result;
    ModelSpec model;  // with the derived init seed
};

inline SeedRun train_one_seed(const RunConfig& cfg, const Dataset& data, std::uint64_t seed) {
    SeedRun run;
    run.seed = seed;
    run.model = cfg.model;
    run.model.init_seed = init_seed_for(seed);
    run.result = train(run.model, data, cfg.optimizer, cfg.train, shuffle_seed_for(seed));
    return run;
}

} // namespace exp_detail

/// Files produced by one probe dispatch.
inline std::vector<std::string> emit_probe(const Checkpoint& ckpt, const ProbeSpec& probe, const fs::path& dir,
                                           const std::string& prefix, EmitFormat format) {
    const Dataset data = generate_dataset(ckpt.data);
    const int batch_size = probe.batch_size > 0 ? probe.batch_size : ckpt.batch_size;
    const Batch batch = first_batch(data.train, std::min(batch_size, data.train.size()));
    ModelObjective obj(ckpt.model, batch);
    std::vector<std::string> files;
    auto emit_svg = [&](const std::string& name, const std::string& markup) {
        if (format != EmitFormat::csv_svg) return;
        exp_detail::write_text(dir / name, markup);
        files.push_back(name);
    };

    if (probe.kind == "ray") {
        std::vector<RayProbe> probes;
        const auto grid = default_ray_grid(probe.rho);
        for (int n = 1; n <= probe.steps; ++n) {
            AscentConfig cfg;
            cfg.rho = probe.rho;
            cfg.steps = n;
            probes.push_back(ray_probe(obj, ckpt.params, cfg, grid));
        }
        const std::string name = prefix + "ray.csv";
        write_rays_csv(probes, (dir / name).string());
        files.push_back(name);
        std::vector<SvgSeries> series;
        for (const auto& p : probes)
            series.push_back({"N=" + std::to_string(p.ascent_steps), p.losses});
        emit_svg(prefix + "ray.svg", line_chart_svg("loss along ascent rays", grid, series));
        return files;
    }
    if (probe.kind == "grid") {
        AscentConfig cfg_a;
        cfg_a.rho = probe.rho;
        cfg_a.steps = 1;
        AscentConfig cfg_b = cfg_a;
        cfg_b.steps = std::max(2, probe.steps);
        const AscentTrajectory ta = ascent_multi(obj, ckpt.params, cfg_a);
        const AscentTrajectory tb = ascent_multi(obj, ckpt.params, cfg_b);
        if (ta.degenerate || tb.degenerate) throw NumericError("grid probe: degenerate ascent direction");
        const auto grid = symmetric_grid(1.5 * probe.rho, probe.grid_points);
        const GridProbe gp = grid_probe(obj, ckpt.params, ta.direction, tb.direction, grid, grid);
        const std::string name = prefix + "grid.csv";
        write_grid_csv(gp, (dir / name).string());
        files.push_back(name);
        const std::string sname = prefix + "grid_summary.csv";
        write_grid_summary_csv(gp, (dir / sname).string());
        files.push_back(sname);
        std::vector<std::string> labels;
        for (double x : grid) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.3g", x);
            labels.push_back(buf);
        }
        emit_svg(prefix + "grid.svg", heatmap_svg("loss surface (v1 x v" + std::to_string(cfg_b.steps) + ")",
                                                  gp.losses, labels, labels));
        return files;
    }
    if (probe.kind == "cosine") {
        const CosineMatrix cm = cosine_matrix(obj, ckpt.params, probe.steps, probe.rho);
        const std::string name = prefix + "cosine.csv";
        write_cosine_csv(cm, (dir / name).string());
        files.push_back(name);
        emit_svg(prefix + "cosine.svg", heatmap_svg("gradient cosine similarities", cm.values, cm.labels, cm.labels));
        return files;
    }
    if (probe.kind == "decrease") {
        const int n_max = std::max(2, probe.steps);
        std::vector<LabeledPoint> points;
        std::vector<LabeledGrad> grads;
        points.push_back({"w", ckpt.params});
        grads.push_back({"g_w", obj.gradient(ckpt.params)});
        std::vector<ParamVector> finals;
        for (int n = 1; n <= n_max; ++n) {
            AscentConfig cfg;
            cfg.rho = probe.rho;
            cfg.steps = n;
            const AscentTrajectory traj = ascent_multi(obj, ckpt.params, cfg);
            if (traj.degenerate) throw NumericError("decrease probe: degenerate ascent direction");
            finals.push_back(traj.final_perturbed);
            points.push_back({"p" + std::to_string(n), traj.final_perturbed});
            grads.push_back({"g_p" + std::to_string(n), obj.gradient(traj.final_perturbed)});
        }
        if (finals.size() >= 2) {
            const auto interp = interpolated_points(finals[0], finals[1], 5, "interp");
            for (std::size_t i = 1; i + 1 < interp.size(); ++i) points.push_back(interp[i]);
        }
        const DecreaseMatrix dm = decrease_matrix(obj, points, grads, probe.lr);
        const std::string name = prefix + "decrease.csv";
        write_decrease_csv(dm, (dir / name).string());
        files.push_back(name);
        emit_svg(prefix + "decrease.svg",
                 heatmap_svg("loss decrease per (weight, gradient)", dm.delta, dm.point_labels, dm.grad_labels));
        return files;
    }
    if (probe.kind == "spectrum") {
        const SpectrumReport report = hessian_spectrum(obj, ckpt.params, probe.steps, probe.iterations, probe.seed);
        const std::string name = prefix + "spectrum.csv";
        write_spectrum_csv(report, (dir / name).string());
        files.push_back(name);
        std::vector<double> ranks, values;
        for (std::size_t k = 0; k < report.eigenvalues.size(); ++k) {
            ranks.push_back(static_cast<double>(k + 1));
            values.push_back(report.eigenvalues[k].value);
        }
        emit_svg(prefix + "spectrum.svg", line_chart_svg("top Hessian eigenvalues", ranks, {{"eigenvalue", values}}));
        return files;
    }
    throw ConfigError("unknown probe '" + probe.kind +
                      "'; valid probes: ray, grid, cosine, decrease, spectrum");
}

/// train: one run per seed -> metrics CSV, checkpoint, requested analyses,
/// manifest. Returns the run directory.
inline fs::path run_train(const RunConfig& cfg, const fs::path& out_dir, EmitFormat format = EmitFormat::csv) {
    exp_detail::ensure_dir(out_dir);
    const Dataset data = generate_dataset(cfg.data);

    RunManifest manifest;
    manifest.command = "train";
    manifest.config_digest = config_hash(to_json(cfg));
    manifest.created = timestamp_utc();

    for (std::uint64_t seed : cfg.seeds) {
        const exp_detail::SeedRun run = exp_detail::train_one_seed(cfg, data, seed);
        const std::string tag = "seed" + std::to_string(seed);
        if (run.result.aborted) {
            json snap;
            snap["seed"] = seed;
            snap["epoch"] = run.result.abort_epoch;
            snap["batch_index"] = run.result.abort_batch;
            snap["reason"] = run.result.abort_reason;
            json params = json::array();
            for (double v : run.result.params) params.push_back(format_double(v));
            snap["params"] = params;
            const fs::path snap_path = out_dir / ("snapshot_" + tag + ".json");
            exp_detail::write_text(snap_path, snap.dump(2) + "\n");
            throw NumericError("training aborted (" + run.result.abort_reason + "); snapshot written to " +
                               snap_path.string());
        }

        const std::string metrics_name = "metrics_" + tag + ".csv";
        write_metrics_csv(run.result.log, (out_dir / metrics_name).string());
        add_file(manifest, out_dir, metrics_name);

        Checkpoint ckpt;
        ckpt.model = run.model;
        ckpt.params = run.result.params;
        ckpt.data = cfg.data;
        ckpt.batch_size = cfg.train.batch_size;
        ckpt.run_seed = seed;
        {
            const Batch analysis = first_batch(data.train, std::min(cfg.train.batch_size, data.train.size()));
            ckpt.analysis_batch_loss = forward(run.model, run.result.params, analysis);
        }
        SeedSummary summary;
        summary.seed = seed;
        summary.steps = run.result.steps;
        summary.gradient_evals = run.result.counts.gradients;
        bool saw_train = false, saw_test = false;
        for (auto it = run.result.log.rbegin(); it != run.result.log.rend() && !(saw_train && saw_test); ++it) {
            if (it->split == "train" && !saw_train) {
                saw_train = true;
                ckpt.final_train_loss = it->loss;
                summary.final_train_loss = it->loss;
                summary.final_train_accuracy = it->accuracy;
            } else if (it->split == "test" && !saw_test) {
                saw_test = true;
                ckpt.final_test_loss = it->loss;
                ckpt.final_test_accuracy = it->accuracy;
                summary.final_test_loss = it->loss;
                summary.final_test_accuracy = it->accuracy;
            }
        }
        manifest.seeds.push_back(summary);

        const std::string ckpt_name = "checkpoint_" + tag + ".json";
        save_checkpoint(ckpt, (out_dir / ckpt_name).string());
        add_file(manifest, out_dir, ckpt_name);

        for (const auto& probe : cfg.analyses) {
            const auto files = emit_probe(ckpt, probe, out_dir, tag + "_", format);
            for (const auto& f : files) add_file(manifest, out_dir, f);
        }
    }
    write_manifest(manifest, out_dir);
    return out_dir;
}

/// probe: run one analysis against a saved checkpoint.
inline fs::path run_probe(const std::string& checkpoint_path, const ProbeSpec& probe, const fs::path& out_dir,
                          EmitFormat format = EmitFormat::csv) {
    exp_detail::ensure_dir(out_dir);
    const Checkpoint ckpt = load_checkpoint(checkpoint_path);
    RunManifest manifest;
    manifest.command = "probe";
    manifest.config_digest = config_hash(to_json(probe));
    manifest.created = timestamp_utc();
    const auto files = emit_probe(ckpt, probe, out_dir, "", format);
    for (const auto& f : files) add_file(manifest, out_dir, f);
    write_manifest(manifest, out_dir);
    return out_dir;
}

struct CompareRow {
    std::string name;
    int seeds = 0;
    double mean_test_accuracy = 0.0;
    double std_test_accuracy = 0.0;
    bool best = false;
};

/// compare: train every config (>= 2, same dataset) and tabulate final
/// test accuracy across seeds.
inline std::vector<CompareRow> run_compare(const std::vector<RunConfig>& configs, const fs::path& out_dir) {
    if (configs.empty()) throw ConfigError("compare needs at least one config");
    const json ref_data = to_json(configs.front().data);
    for (const auto& cfg : configs)
        if (to_json(cfg.data) != ref_data)
            throw ConfigError("compare: configs use different datasets; refusing to aggregate");
    exp_detail::ensure_dir(out_dir);

    std::vector<CompareRow> rows;
    for (const auto& cfg : configs) {
        const Dataset data = generate_dataset(cfg.data);
        std::vector<double> accs;
        for (std::uint64_t seed : cfg.seeds) {
            const auto run = exp_detail::train_one_seed(cfg, data, seed);
            if (run.result.aborted) throw NumericError("compare: run '" + cfg.name + "' aborted");
            double acc = 0.0;
            for (auto it = run.result.log.rbegin(); it != run.result.log.rend(); ++it)
                if (it->split == "test") {
                    acc = it->accuracy;
                    break;
                }
            accs.push_back(acc);
        }
        double mean = 0.0, stdev = 0.0;
        detail::mean_std(accs, mean, stdev);
        rows.push_back({cfg.name, static_cast<int>(accs.size()), mean, stdev, false});
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].mean_test_accuracy > rows[best].mean_test_accuracy) best = i;
    rows[best].best = true;

    {
        CsvWriter csv((out_dir / "compare.csv").string());
        csv.row({"method", "seeds", "mean_test_accuracy", "std_test_accuracy", "best"});
        for (const auto& r : rows)
            csv.row({r.name, std::to_string(r.seeds), format_double(r.mean_test_accuracy),
                     format_double(r.std_test_accuracy), r.best ? "1" : "0"});
    }

    RunManifest manifest;
    manifest.command = "compare";
    json all = json::array();
    for (const auto& cfg : configs) all.push_back(to_json(cfg));
    manifest.config_digest = config_hash(all);
    manifest.created = timestamp_utc();
    add_file(manifest, out_dir, "compare.csv");
    write_manifest(manifest, out_dir);
    return rows;
}

enum class SweepAxis { rho, steps, ratio };

inline SweepAxis sweep_axis_from_string(const std::string& s) {
    if (s == "rho") return SweepAxis::rho;
    if (s == "steps") return SweepAxis::steps;
    if (s == "ratio") return SweepAxis::ratio;
    throw ConfigError("unknown sweep axis '" + s + "' (expected rho, steps or ratio)");
}

/// "a:b:..." -> per-step radii proportional to the parts, summing to rho.
inline std::vector<double> radii_from_ratio(const std::string& ratio, double rho) {
    std::vector<double> parts;
    std::string token;
    std::stringstream ss(ratio);
    while (std::getline(ss, token, ':')) {
        if (token.empty()) throw ConfigError("bad ratio '" + ratio + "'");
        parts.push_back(parse_double(token));
    }
    if (parts.size() < 2) throw ConfigError("ratio '" + ratio + "' needs at least two parts");
    double sum = 0.0;
    for (double p : parts) {
        if (p < 0.0) throw ConfigError("ratio parts must be >= 0");
        sum += p;
    }
    if (sum <= 0.0) throw ConfigError("ratio parts must not all be zero");
    std::vector<double> radii;
    for (double p : parts) radii.push_back(rho * (p / sum));
    return radii;
}

inline RunConfig apply_sweep_value(const RunConfig& base, SweepAxis axis, const std::string& value) {
    RunConfig cfg = base;
    switch (axis) {
        case SweepAxis::rho:
            cfg.optimizer.ascent.rho = parse_double(value);
            break;
        case SweepAxis::steps: {
            cfg.optimizer.ascent.steps = static_cast<int>(std::stol(value));
            cfg.optimizer.ascent.step_radii.clear();
            cfg.optimizer.msam_weights.clear();
            break;
        }
        case SweepAxis::ratio: {
            const auto radii = radii_from_ratio(value, cfg.optimizer.ascent.rho);
            cfg.optimizer.ascent.steps = static_cast<int>(radii.size());
            cfg.optimizer.ascent.step_radii = radii;
            cfg.optimizer.msam_weights.clear();
            break;
        }
    }
    cfg.optimizer.validate();
    return cfg;
}

struct SweepRow {
    std::string method;
    std::string value;
    double mean_test_accuracy = 0.0;
    double std_test_accuracy = 0.0;
};

/// sweep: rerun each config at every axis value; accuracy-vs-axis table.
inline std::vector<SweepRow> run_sweep(const std::vector<RunConfig>& configs, SweepAxis axis,
                                       const std::vector<std::string>& values, const fs::path& out_dir) {
    if (configs.empty()) throw ConfigError("sweep needs at least one config");
    if (values.empty()) throw ConfigError("sweep needs at least one axis value");
    exp_detail::ensure_dir(out_dir);

    std::vector<SweepRow> rows;
    for (const auto& base : configs) {
        const Dataset data = generate_dataset(base.data);
        for (const auto& value : values) {
            const RunConfig cfg = apply_sweep_value(base, axis, value);
            std::vector<double> accs;
            for (std::uint64_t seed : cfg.seeds) {
                const auto run = exp_detail::train_one_seed(cfg, data, seed);
                if (run.result.aborted)
                    throw NumericError("sweep: run '" + cfg.name + "' aborted at value " + value);
                double acc = 0.0;
                for (auto it = run.result.log.rbegin(); it != run.result.log.rend(); ++it)
                    if (it->split == "test") {
                        acc = it->accuracy;
                        break;
                    }
                accs.push_back(acc);
            }
            double mean = 0.0, stdev = 0.0;
            detail::mean_std(accs, mean, stdev);
            rows.push_back({base.name, value, mean, stdev});
        }
    }

    const char* axis_name = axis == SweepAxis::rho ? "rho" : axis == SweepAxis::steps ? "steps" : "ratio";
    {
        CsvWriter csv((out_dir / "sweep.csv").string());
        csv.row({"method", axis_name, "mean_test_accuracy", "std_test_accuracy"});
        for (const auto& r : rows)
            csv.row({r.method, r.value, format_double(r.mean_test_accuracy), format_double(r.std_test_accuracy)});
    }

    RunManifest manifest;
    manifest.command = "sweep";
    json all = json::array();
    for (const auto& cfg : configs) all.push_back(to_json(cfg));
    all.push_back(json(values));
    manifest.config_digest = config_hash(all);
    manifest.created = timestamp_utc();
    add_file(manifest, out_dir, "sweep.csv");
    write_manifest(manifest, out_dir);
    return rows;
}

/// oracle: expose the brute-force inner max on a named toy loss.
inline InnerMaxResult run_oracle(const std::string& loss_name, const Vec& at, double rho, int resolution,
                                 const fs::path& out_dir) {
    const auto obj = make_toy_loss(loss_name);
    if (static_cast<int>(at.size()) != obj->dim())
        throw ConfigError("oracle: loss '" + loss_name + "' expects " + std::to_string(obj->dim()) +
                          " coordinates");
    const InnerMaxResult result = bruteforce_inner_max(*obj, at, rho, resolution);
    exp_detail::ensure_dir(out_dir);
    {
        CsvWriter csv((out_dir / "oracle.csv").string());
        std::vector<std::string> header = {"loss", "rho", "resolution", "max_loss", "grid_spacing"};
        for (std::size_t i = 0; i < result.argmax_direction.size(); ++i)
            header.push_back("u" + std::to_string(i));
        csv.row(header);
        std::vector<std::string> cells = {loss_name, format_double(rho), std::to_string(resolution),
                                          format_double(result.max_loss), format_double(result.grid_spacing)};
        for (double u : result.argmax_direction) cells.push_back(format_double(u));
        csv.row(cells);
    }

    RunManifest manifest;
    manifest.command = "oracle";
    manifest.config_digest = config_hash(json{{"loss", loss_name}, {"rho", rho}, {"resolution", resolution}});
    manifest.created = timestamp_utc();
    add_file(manifest, out_dir, "oracle.csv");
    write_manifest(manifest, out_dir);
    return result;
}

/// dataset: export the generated train/test splits as CSV.
inline fs::path run_dataset(const DatasetSpec& spec, const fs::path& out_dir) {
    exp_detail::ensure_dir(out_dir);
    const Dataset data = generate_dataset(spec);
    export_split_csv(data.train, (out_dir / "train.csv").string());
    export_split_csv(data.test, (out_dir / "test.csv").string());
    RunManifest manifest;
    manifest.command = "dataset";
    manifest.config_digest = config_hash(to_json(spec));
    manifest.created = timestamp_utc();
    add_file(manifest, out_dir, "train.csv");
    add_file(manifest, out_dir, "test.csv");
    write_manifest(manifest, out_dir);
    return out_dir;
}

} // namespace samlab
