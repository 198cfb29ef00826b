// driftlab command line: simulate / poison / audit / sweep / gen.

#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "driftlab/demos.hpp"
#include "driftlab/errors.hpp"
#include "driftlab/experiment.hpp"
#include "driftlab/io.hpp"
#include "driftlab/poison.hpp"

namespace fs = std::filesystem;
using namespace driftlab;

namespace {

std::string now_utc() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open for writing: " + path.string());
    out << content;
}

void write_outputs(const fs::path& dir, const ExperimentConfig& config, const SweepOutputs& outputs) {
    fs::create_directories(dir);
    std::vector<std::string> names;
    for (const auto& [name, content] : outputs.files) {
        write_file(dir / name, content);
        names.push_back(name);
    }
    write_file(dir / "manifest.json", manifest_json(config, names, now_utc()));
}

ExperimentConfig load_config_with_overrides(const std::string& path,
                                            const std::optional<std::uint64_t>& seed) {
    ExperimentConfig config = load_experiment_config(path);
    if (seed) config.master_seed = *seed;
    return config;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 const std::optional<std::uint64_t>& seed, int jobs) {
    const ExperimentConfig config = load_config_with_overrides(config_path, seed);
    const SweepOutputs outputs = run_simulate(config, jobs);
    write_outputs(out_dir, config, outputs);
    std::cout << "wrote " << outputs.files.size() + 1 << " files to " << out_dir << "\n";
    for (const auto& [name, content] : outputs.files)
        if (name == "metrics.csv") std::cout << content;
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              const std::optional<std::uint64_t>& seed, int jobs) {
    const ExperimentConfig config = load_config_with_overrides(config_path, seed);
    const SweepOutputs outputs = run_sweep(config, jobs);
    write_outputs(out_dir, config, outputs);
    for (const auto& [name, content] : outputs.files) {
        std::cout << "== " << name << "\n" << content;
    }
    return 0;
}

int cmd_poison(const std::string& in_path, const std::string& out_path,
               const std::string& report_path, const std::string& config_path,
               int episodes_per_task, std::uint64_t seed, bool filter_noops) {
    const Dataset dataset = read_dataset_file(in_path);
    const AttackConfig config =
        config_path.empty() ? AttackConfig{} : load_attack_config(config_path);
    auto [poisoned, report] = poison_dataset(dataset, config, episodes_per_task, seed, filter_noops);
    write_dataset_file(out_path, poisoned);
    const std::string report_json = poison_report_to_json(report);
    if (!report_path.empty()) write_file(report_path, report_json);
    std::cout << report_json << "\n";
    return 0;
}

int cmd_audit(const std::string& in_path, const std::string& limits_path,
              const std::string& calibrate_path, const std::string& out_path, double percentile,
              double safety) {
    KinematicLimits limits;
    if (!limits_path.empty()) {
        limits = limits_from_json_file(limits_path);
    } else if (!calibrate_path.empty()) {
        const Dataset clean = read_dataset_file(calibrate_path);
        std::vector<StateTrajectory> trajectories;
        trajectories.reserve(clean.size());
        for (const auto& demo : clean) trajectories.push_back(demo_to_trajectory(demo));
        limits = calibrate_limits(trajectories, percentile, safety);
        std::cerr << "calibrated limits: " << limits_to_json(limits) << "\n";
    } else {
        std::cerr << "audit: provide --limits FILE or --calibrate CLEAN_DATASET\n";
        return 2;
    }

    // Dataset or single-trajectory input, told apart by the header kind.
    AuditResult result;
    {
        std::ifstream probe(in_path);
        if (!probe) throw FormatError("cannot open: " + in_path);
        std::string first_line;
        std::getline(probe, first_line);
        const bool is_trajectory = first_line.find("\"trajectory\"") != std::string::npos;
        if (is_trajectory) {
            std::ifstream in(in_path);
            result = audit_trajectory(read_trajectory(in, in_path), in_path, limits);
        } else {
            result = audit_dataset(read_dataset_file(in_path), limits);
        }
    }

    std::ostringstream rows;
    for (const auto& line : result.verdict_lines) rows << line << '\n';
    if (!out_path.empty())
        write_file(out_path, rows.str());
    else
        std::cout << rows.str();
    std::cerr << result.violations << " of " << result.episodes << " episodes violate limits\n";
    return result.violations > 0 ? 1 : 0;
}

int cmd_gen(const std::string& out_path, int tasks, int episodes_per_task, std::uint64_t seed) {
    DemoSpec spec;
    spec.n_tasks = tasks;
    spec.episodes_per_task = episodes_per_task;
    const Dataset dataset = make_demo_dataset(spec, seed);
    write_dataset_file(out_path, dataset);
    std::cout << "wrote " << dataset.size() << " episodes to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"drift-accumulation attack simulator for action-chunked delta-pose policies"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    std::optional<std::uint64_t> seed_override;
    int jobs = 1;

    auto add_run_flags = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config JSON")->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed_override, "override master_seed");
        cmd->add_option("--jobs", jobs, "worker threads (does not affect outputs)");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "run clean + triggered episodes");
    add_run_flags(simulate);

    CLI::App* sweep = app.add_subcommand("sweep", "run the configured ablation axes");
    add_run_flags(sweep);

    std::string in_path, out_path, report_path, attack_config_path;
    int episodes_per_task = 1;
    std::uint64_t seed = 1;
    bool filter_noops = false;
    CLI::App* poison = app.add_subcommand("poison", "poison a demonstration dataset");
    poison->add_option("--in", in_path, "input dataset JSONL")->required();
    poison->add_option("--out", out_path, "output dataset JSONL")->required();
    poison->add_option("--report", report_path, "poison report JSON");
    poison->add_option("--config", attack_config_path, "attack config JSON");
    poison->add_option("--episodes-per-task", episodes_per_task, "episodes to poison per task");
    poison->add_option("--seed", seed, "selection seed");
    poison->add_flag("--filter-noops", filter_noops, "drop no-operation frames first");

    std::string limits_path, calibrate_path, audit_out;
    double percentile = 0.999, safety = 1.5;
    CLI::App* audit = app.add_subcommand("audit", "validate kinematic consistency");
    audit->add_option("--in", in_path, "dataset or trajectory JSONL")->required();
    audit->add_option("--limits", limits_path, "limits JSON");
    audit->add_option("--calibrate", calibrate_path, "clean dataset to calibrate limits from");
    audit->add_option("--out", audit_out, "verdicts JSONL (default stdout)");
    audit->add_option("--percentile", percentile, "calibration percentile");
    audit->add_option("--safety", safety, "calibration safety factor");

    int tasks = 10;
    CLI::App* gen = app.add_subcommand("gen", "generate a clean synthetic dataset");
    gen->add_option("--out", out_path, "output dataset JSONL")->required();
    gen->add_option("--tasks", tasks, "number of tasks");
    gen->add_option("--episodes-per-task", episodes_per_task, "episodes per task");
    gen->add_option("--seed", seed, "generation seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(config_path, out_dir, seed_override, jobs);
        if (sweep->parsed()) return cmd_sweep(config_path, out_dir, seed_override, jobs);
        if (poison->parsed())
            return cmd_poison(in_path, out_path, report_path, attack_config_path,
                              episodes_per_task, seed, filter_noops);
        if (audit->parsed())
            return cmd_audit(in_path, limits_path, calibrate_path, audit_out, percentile, safety);
        if (gen->parsed()) return cmd_gen(out_path, tasks, episodes_per_task, seed);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
