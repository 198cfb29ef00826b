#include "driftlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "driftlab/demos.hpp"
#include "driftlab/errors.hpp"
#include "driftlab/seeds.hpp"

namespace driftlab {

using nlohmann::json;

ConditionResult run_condition(const std::string& name, const SceneSpec& scenario,
                              const PlannerConfig& planner, const DeploymentAttack& attack,
                              const std::optional<DefensePolicy>& defense, int n_episodes,
                              std::uint64_t master_seed, std::uint64_t condition_index, int jobs) {
    if (n_episodes < 1) throw ConfigError("run_condition: n_episodes must be >= 1");

    ConditionResult result;
    result.condition = name;
    result.clean.resize(static_cast<std::size_t>(n_episodes));
    // With the attack disabled there is no triggered arm; ASR is then null.
    if (attack.enabled) result.triggered.resize(static_cast<std::size_t>(n_episodes));

    DeploymentAttack off = attack;
    off.enabled = false;

    auto run_range = [&](int begin, int end) {
        for (int e = begin; e < end; ++e) {
            const std::uint64_t seed = derive_seed(master_seed, condition_index,
                                                   static_cast<std::uint64_t>(e));
            const Scene scene = sample_scene(scenario, seed);
            result.clean[static_cast<std::size_t>(e)] =
                rollout_episode(scene, planner, off, defense, seed);
            if (attack.enabled)
                result.triggered[static_cast<std::size_t>(e)] =
                    rollout_episode(scene, planner, attack, defense, seed);
        }
    };

    const int workers = std::max(1, std::min(jobs, n_episodes));
    if (workers == 1) {
        run_range(0, n_episodes);
    } else {
        std::vector<std::thread> pool;
        const int per = (n_episodes + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const int begin = w * per;
            const int end = std::min(n_episodes, begin + per);
            if (begin >= end) break;
            pool.emplace_back(run_range, begin, end);
        }
        for (auto& t : pool) t.join();
    }

    result.metrics = compute_metrics(result.clean, result.triggered);
    return result;
}

AsrInterval bootstrap_asr_interval(const ConditionResult& result, std::uint64_t master_seed,
                                   std::uint64_t condition_index, int n_resamples) {
    const std::size_t n_clean = result.clean.size();
    const std::size_t n_trig = result.triggered.size();
    if (n_clean == 0 || n_trig == 0) return {};

    std::mt19937_64 eng(derive_seed(master_seed, kConditionBootstrapTag, condition_index));
    std::uniform_int_distribution<std::size_t> pick_clean(0, n_clean - 1);
    std::uniform_int_distribution<std::size_t> pick_trig(0, n_trig - 1);

    std::vector<double> samples;
    samples.reserve(static_cast<std::size_t>(n_resamples));
    for (int b = 0; b < n_resamples; ++b) {
        std::size_t ok_clean = 0, ok_trig = 0;
        for (std::size_t i = 0; i < n_clean; ++i)
            ok_clean += result.clean[pick_clean(eng)].success ? 1 : 0;
        for (std::size_t i = 0; i < n_trig; ++i)
            ok_trig += result.triggered[pick_trig(eng)].success ? 1 : 0;
        const double ctsr = static_cast<double>(ok_clean) / static_cast<double>(n_clean);
        if (ctsr <= 0.0) continue;  // ASR undefined on this resample
        const double sr = static_cast<double>(ok_trig) / static_cast<double>(n_trig);
        samples.push_back((ctsr - sr) / ctsr);
    }
    if (samples.empty()) return {};
    std::sort(samples.begin(), samples.end());
    auto pct = [&](double p) {
        const std::size_t rank = static_cast<std::size_t>(
            std::ceil(p * static_cast<double>(samples.size())));
        return samples[std::min(samples.size() - 1, rank == 0 ? 0 : rank - 1)];
    };
    return {pct(0.025), pct(0.975)};
}

namespace {

std::string opt_to_string(const std::optional<double>& v) {
    return v ? format_double(*v) : "null";
}

}  // namespace

std::string metrics_csv(const std::vector<ConditionResult>& results) {
    std::ostringstream out;
    out << "condition,ctsr,sr_trigger,asr,n\n";
    for (const auto& r : results) {
        out << r.condition << ',' << format_double(r.metrics.ctsr) << ','
            << format_double(r.metrics.sr_trigger) << ',' << opt_to_string(r.metrics.asr) << ','
            << r.metrics.n_clean << '\n';
    }
    return out.str();
}

std::string episodes_jsonl(const ConditionResult& result) {
    std::ostringstream out;
    auto emit = [&](const char* arm, const std::vector<EpisodeOutcome>& outcomes) {
        for (std::size_t e = 0; e < outcomes.size(); ++e) {
            const EpisodeOutcome& o = outcomes[e];
            json j{{"v", kSchemaVersion},
                   {"condition", result.condition},
                   {"arm", arm},
                   {"episode", e},
                   {"seed", o.seed},
                   {"success", o.success},
                   {"final_distance_m", o.final_distance},
                   {"chunks_executed", o.chunks_executed},
                   {"steps", o.trajectory.states.size() - 1},
                   {"grasped", o.grasped}};
            j["attack_fired_at"] = o.attack_fired_at ? json(*o.attack_fired_at) : json(nullptr);
            j["grasp_step"] = o.grasped ? json(o.grasp_step) : json(nullptr);
            out << j.dump() << '\n';
        }
    };
    emit("clean", result.clean);
    emit("triggered", result.triggered);
    return out.str();
}

std::string manifest_json(const ExperimentConfig& config,
                          const std::vector<std::string>& output_files,
                          const std::string& timestamp) {
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(config_hash(config)));
    const json j{{"v", kSchemaVersion},
                 {"config_hash", hash},
                 {"tool_version", kToolVersion},
                 {"timestamp", timestamp},
                 {"outputs", output_files}};
    return j.dump(2);
}

SweepOutputs run_simulate(const ExperimentConfig& config, int jobs) {
    const DeploymentAttack attack = config.attack.build();
    ConditionResult result =
        run_condition("default", config.scenario, config.planner, attack, config.defense,
                      config.n_episodes, config.master_seed, kConditionSimulate, jobs);
    SweepOutputs out;
    out.files.emplace_back("episodes.jsonl", episodes_jsonl(result));
    out.files.emplace_back("metrics.csv", metrics_csv({result}));
    return out;
}

namespace {

std::string activation_label(double v) {
    return std::isinf(v) ? "full" : format_double(v);
}

struct SweepRow {
    std::string label;
    ConditionResult result;
    AsrInterval interval;
};

std::string sweep_csv(const std::string& axis_name, const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << axis_name << ",ctsr,sr_trigger,asr,asr_lo,asr_hi,n\n";
    for (const auto& row : rows) {
        out << row.label << ',' << format_double(row.result.metrics.ctsr) << ','
            << format_double(row.result.metrics.sr_trigger) << ','
            << opt_to_string(row.result.metrics.asr) << ',' << opt_to_string(row.interval.lo) << ','
            << opt_to_string(row.interval.hi) << ',' << row.result.metrics.n_clean << '\n';
    }
    return out.str();
}

}  // namespace

SweepOutputs run_sweep(const ExperimentConfig& config, int jobs) {
    SweepOutputs out;
    if (config.sweep.chunk_size.empty() && config.sweep.activation_distance_m.empty() &&
        config.sweep.profile.empty())
        throw ConfigError("sweep: no axes configured");

    if (!config.sweep.chunk_size.empty()) {
        std::vector<SweepRow> rows;
        for (std::size_t i = 0; i < config.sweep.chunk_size.size(); ++i) {
            const int k = config.sweep.chunk_size[i];
            PlannerConfig planner = config.planner;
            planner.chunk_size = k;
            const std::uint64_t cond = kConditionChunkAxis + i;
            SweepRow row;
            row.label = std::to_string(k);
            row.result = run_condition("chunk_size=" + row.label, config.scenario, planner,
                                       config.attack.build(), config.defense, config.n_episodes,
                                       config.master_seed, cond, jobs);
            row.interval = bootstrap_asr_interval(row.result, config.master_seed, cond);
            rows.push_back(std::move(row));
        }
        out.files.emplace_back("sweep_chunk_size.csv", sweep_csv("chunk_size", rows));
    }

    if (!config.sweep.activation_distance_m.empty()) {
        std::vector<SweepRow> rows;
        for (std::size_t i = 0; i < config.sweep.activation_distance_m.size(); ++i) {
            const double activation = config.sweep.activation_distance_m[i];
            AttackSetup setup = config.attack;
            setup.activation_distance_m = activation;
            const std::uint64_t cond = kConditionActivationAxis + i;
            SweepRow row;
            row.label = activation_label(activation);
            row.result = run_condition("activation=" + row.label, config.scenario, config.planner,
                                       setup.build(), config.defense, config.n_episodes,
                                       config.master_seed, cond, jobs);
            row.interval = bootstrap_asr_interval(row.result, config.master_seed, cond);
            rows.push_back(std::move(row));
        }
        out.files.emplace_back("sweep_activation.csv", sweep_csv("activation_distance_m", rows));
    }

    if (!config.sweep.profile.empty()) {
        std::vector<SweepRow> rows;
        for (std::size_t i = 0; i < config.sweep.profile.size(); ++i) {
            AttackSetup setup = config.attack;
            setup.profile_kind = config.sweep.profile[i];
            const std::uint64_t cond = kConditionProfileAxis + i;
            SweepRow row;
            row.label = to_string(config.sweep.profile[i]);
            row.result = run_condition("profile=" + row.label, config.scenario, config.planner,
                                       setup.build(), config.defense, config.n_episodes,
                                       config.master_seed, cond, jobs);
            row.interval = bootstrap_asr_interval(row.result, config.master_seed, cond);
            rows.push_back(std::move(row));
        }
        out.files.emplace_back("sweep_profile.csv", sweep_csv("profile", rows));
    }
    return out;
}

AuditResult audit_trajectory(const StateTrajectory& traj, const std::string& name,
                             const KinematicLimits& limits) {
    AuditResult result;
    const DetectionVerdict verdict = validate_kinematics(traj, limits);
    result.verdict_lines.push_back(verdict_to_json(name, verdict));
    result.episodes = 1;
    result.violations = verdict.all_ok() ? 0 : 1;
    return result;
}

AuditResult audit_dataset(const Dataset& dataset, const KinematicLimits& limits) {
    AuditResult result;
    for (const Demonstration& demo : dataset) {
        const StateTrajectory traj = demo_to_trajectory(demo);
        const DetectionVerdict verdict = validate_kinematics(traj, limits);
        result.verdict_lines.push_back(verdict_to_json(demo.episode_id, verdict));
        ++result.episodes;
        if (!verdict.all_ok()) ++result.violations;
    }
    return result;
}

}  // namespace driftlab
