// samlab: train/compare/probe/sweep/oracle/dataset commands for the
// sharpness-aware minimization laboratory.
//
// Exit codes: 0 success, 1 config error, 2 numerical abort, 3 I/O error.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "samlab/samlab.hpp"

namespace {

samlab::RunConfig load_with_overrides(const std::string& path, const std::vector<std::uint64_t>& seeds) {
    samlab::RunConfig cfg = samlab::load_run_config(path);
    if (!seeds.empty()) cfg.seeds = seeds;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"desk-scale laboratory for sharpness-aware minimization"};
    app.set_version_flag("--version", std::string("samlab ") + samlab::kVersion);
    app.require_subcommand(1);

    std::vector<std::string> config_paths;
    std::vector<std::uint64_t> seeds;
    std::string out_dir = "out";
    std::string format_name = "csv";

    auto add_common = [&](CLI::App* cmd, bool many_configs) {
        cmd->add_option("--config", config_paths, "experiment config file (JSON)")
            ->required()
            ->expected(many_configs ? -1 : 1);
        cmd->add_option("--seed", seeds, "override the config's seed list (repeatable)");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--format", format_name, "csv | csv+svg");
    };

    CLI::App* train_cmd = app.add_subcommand("train", "train one config across its seeds");
    add_common(train_cmd, false);

    CLI::App* compare_cmd = app.add_subcommand("compare", "train several configs and tabulate test accuracy");
    add_common(compare_cmd, true);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "rerun configs along a rho/steps/ratio axis");
    add_common(sweep_cmd, true);
    std::string axis_name = "rho";
    std::vector<std::string> sweep_values;
    sweep_cmd->add_option("--axis", axis_name, "rho | steps | ratio")->required();
    sweep_cmd->add_option("--value", sweep_values, "axis values (repeatable; ratio values like 1:2)")->required();

    CLI::App* probe_cmd = app.add_subcommand("probe", "run a landscape analysis on a checkpoint");
    std::string checkpoint_path;
    samlab::ProbeSpec probe;
    probe_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint JSON from train")->required();
    probe_cmd->add_option("--probe", probe.kind, "ray | grid | cosine | decrease | spectrum")->required();
    probe_cmd->add_option("--rho", probe.rho, "perturbation radius");
    probe_cmd->add_option("--steps", probe.steps, "ascent steps / matrix size / top-k");
    probe_cmd->add_option("--iterations", probe.iterations, "power iterations (spectrum)");
    probe_cmd->add_option("--lr", probe.lr, "step size for the decrease matrix");
    probe_cmd->add_option("--probe-seed", probe.seed, "start-vector seed (spectrum)");
    probe_cmd->add_option("--grid-points", probe.grid_points, "grid resolution per axis");
    probe_cmd->add_option("--batch-size", probe.batch_size, "analysis batch size (0 = training batch size)");
    probe_cmd->add_option("--out", out_dir, "output directory");
    probe_cmd->add_option("--format", format_name, "csv | csv+svg");

    CLI::App* oracle_cmd = app.add_subcommand("oracle", "brute-force inner max on a toy loss");
    std::string loss_name;
    std::vector<double> at;
    double rho = 1.0;
    int resolution = 3600;
    oracle_cmd->add_option("--loss", loss_name, "toy loss name")->required();
    oracle_cmd->add_option("--at", at, "base point coordinates (repeatable)")->required();
    oracle_cmd->add_option("--rho", rho, "sphere radius");
    oracle_cmd->add_option("--resolution", resolution, "angular grid resolution");
    oracle_cmd->add_option("--out", out_dir, "output directory");

    CLI::App* dataset_cmd = app.add_subcommand("dataset", "export the generated dataset as CSV");
    add_common(dataset_cmd, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        const samlab::EmitFormat format = samlab::format_from_string(format_name);
        if (*train_cmd) {
            const auto cfg = load_with_overrides(config_paths.front(), seeds);
            samlab::run_train(cfg, out_dir, format);
            std::printf("train: wrote %s for %zu seed(s)\n", out_dir.c_str(), cfg.seeds.size());
        } else if (*compare_cmd) {
            std::vector<samlab::RunConfig> configs;
            for (const auto& p : config_paths) configs.push_back(load_with_overrides(p, seeds));
            const auto rows = samlab::run_compare(configs, out_dir);
            for (const auto& r : rows)
                std::printf("%-24s %.4f +/- %.4f%s\n", r.name.c_str(), r.mean_test_accuracy,
                            r.std_test_accuracy, r.best ? "  (best)" : "");
        } else if (*sweep_cmd) {
            std::vector<samlab::RunConfig> configs;
            for (const auto& p : config_paths) configs.push_back(load_with_overrides(p, seeds));
            const auto axis = samlab::sweep_axis_from_string(axis_name);
            const auto rows = samlab::run_sweep(configs, axis, sweep_values, out_dir);
            for (const auto& r : rows)
                std::printf("%-24s %s=%-8s %.4f +/- %.4f\n", r.method.c_str(), axis_name.c_str(),
                            r.value.c_str(), r.mean_test_accuracy, r.std_test_accuracy);
        } else if (*probe_cmd) {
            samlab::run_probe(checkpoint_path, probe, out_dir, format);
            std::printf("probe %s: wrote %s\n", probe.kind.c_str(), out_dir.c_str());
        } else if (*oracle_cmd) {
            const auto result = samlab::run_oracle(loss_name, at, rho, resolution, out_dir);
            std::printf("oracle %s: max loss %.12g over %ld directions\n", loss_name.c_str(), result.max_loss,
                        result.evaluations);
        } else if (*dataset_cmd) {
            const auto cfg = load_with_overrides(config_paths.front(), seeds);
            samlab::run_dataset(cfg.data, out_dir);
            std::printf("dataset: wrote %s\n", out_dir.c_str());
        }
    } catch (const samlab::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const samlab::NumericError& e) {
        std::fprintf(stderr, "numerical abort: %s\n", e.what());
        return 2;
    } catch (const samlab::IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
