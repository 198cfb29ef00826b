#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "driftlab/io.hpp"
#include "driftlab/simenv.hpp"

namespace driftlab {

/// Clean + triggered outcomes of one experimental condition.
struct ConditionResult {
    std::string condition;
    std::vector<EpisodeOutcome> clean;
    std::vector<EpisodeOutcome> triggered;
    MetricsReport metrics;
};

struct AsrInterval {
    std::optional<double> lo;
    std::optional<double> hi;
};

// Condition indices feeding the seed stream. Documented so runs can be
// reproduced: episode seed = derive_seed(master_seed, condition_index,
// episode_index); the same seed drives the paired clean and triggered arms.
inline constexpr std::uint64_t kConditionSimulate = 0;
inline constexpr std::uint64_t kConditionChunkAxis = 1000;
inline constexpr std::uint64_t kConditionActivationAxis = 2000;
inline constexpr std::uint64_t kConditionProfileAxis = 3000;
inline constexpr std::uint64_t kConditionBootstrapTag = 0xB0075;

/// Runs n_episodes paired clean/triggered episodes of one condition.
/// `jobs` is a parallelism hint; outputs are independent of it.
ConditionResult run_condition(const std::string& name, const SceneSpec& scenario,
                              const PlannerConfig& planner, const DeploymentAttack& attack,
                              const std::optional<DefensePolicy>& defense, int n_episodes,
                              std::uint64_t master_seed, std::uint64_t condition_index,
                              int jobs = 1);

/// Seeded percentile-bootstrap 95% interval for the ASR of a condition.
AsrInterval bootstrap_asr_interval(const ConditionResult& result, std::uint64_t master_seed,
                                   std::uint64_t condition_index, int n_resamples = 1000);

/// Rendering helpers shared by the CLI and the acceptance suite.
std::string metrics_csv(const std::vector<ConditionResult>& results);
std::string episodes_jsonl(const ConditionResult& result);
std::string manifest_json(const ExperimentConfig& config,
                          const std::vector<std::string>& output_files,
                          const std::string& timestamp);

struct SweepOutputs {
    // File name -> file content; written verbatim so reruns are byte-stable.
    std::vector<std::pair<std::string, std::string>> files;
};

/// One condition per value of every configured sweep axis; each axis yields a
/// CSV with ASR and its bootstrap interval per value.
SweepOutputs run_sweep(const ExperimentConfig& config, int jobs = 1);

/// The single-condition experiment: episodes JSONL + metrics CSV.
SweepOutputs run_simulate(const ExperimentConfig& config, int jobs = 1);

struct AuditResult {
    std::vector<std::string> verdict_lines;  // one JSON object per episode
    int violations = 0;
    int episodes = 0;
};

/// Validates every episode of a dataset (motion integrated from its actions)
/// or a single trajectory file against the limits.
AuditResult audit_dataset(const Dataset& dataset, const KinematicLimits& limits);
AuditResult audit_trajectory(const StateTrajectory& traj, const std::string& name,
                             const KinematicLimits& limits);

}  // namespace driftlab
