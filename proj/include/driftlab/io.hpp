#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "driftlab/guard.hpp"
#include "driftlab/poison.hpp"
#include "driftlab/simenv.hpp"

namespace driftlab {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "driftlab 0.1.0";

// JSON-lines dataset format. Each episode is a header line
//   {"v":1,"kind":"episode","episode_id":...,"task_id":...,"instruction":...,
//    "target_object":...,"dt_s":...}
// followed by one line per frame
//   {"v":1,"t":...,"ee":{"pos":[3],"ori":[3],"grip":g},"objects":{id:[3]},
//    "trigger":null|{"shape","radius_px","alpha","color"},"action":[7]}
// Readers reject records whose major version is unknown.

void write_dataset(std::ostream& out, const Dataset& dataset);
void write_dataset_file(const std::string& path, const Dataset& dataset);

/// Throws FormatError naming the offending line on parse failure.
Dataset read_dataset(std::istream& in, const std::string& origin = "<stream>");
Dataset read_dataset_file(const std::string& path);

// Trajectory files: {"v":1,"kind":"trajectory","dt_s":...,"n_states":...}
// then {"v":1,"t":...,"ee":{...}} per state.
void write_trajectory(std::ostream& out, const StateTrajectory& traj);
StateTrajectory read_trajectory(std::istream& in, const std::string& origin = "<stream>");

std::string poison_report_to_json(const PoisonReport& report);
std::string verdict_to_json(const std::string& episode_id, const DetectionVerdict& verdict);

KinematicLimits limits_from_json_file(const std::string& path);
std::string limits_to_json(const KinematicLimits& limits);

/// Shortest round-trip decimal rendering; used for all numeric CSV cells so
/// outputs are byte-stable.
std::string format_double(double value);

// ---------------------------------------------------------------------------
// Experiment configuration

struct AttackSetup {
    bool enabled = true;
    ProfileKind profile_kind = ProfileKind::smootherstep_quintic;
    std::optional<double> total_deviation_m = 0.3;  // exactly one of the two scales
    std::optional<double> alpha_m_per_step;
    Vec3 direction{0, 1, 0};
    int t_window_steps = 20;
    double activation_distance_m = 0.15;  // +inf = full-trajectory trigger
    double keyframe_radius_m = 0.15;
    TriggerMode mode = TriggerMode::persistent;
    double noise_sigma = 0.0;

    DeploymentAttack build() const;
};

struct SweepAxes {
    std::vector<int> chunk_size;
    std::vector<double> activation_distance_m;  // +inf entries mean "full"
    std::vector<ProfileKind> profile;
};

struct ExperimentConfig {
    SceneSpec scenario;
    PlannerConfig planner;
    AttackSetup attack;
    std::optional<DefensePolicy> defense;
    SweepAxes sweep;
    int n_episodes = 200;
    std::uint64_t master_seed = 1;
};

/// Parses a config JSON document; ConfigError messages carry the field path.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

/// Canonical serialization of the config (sorted keys), used for hashing.
std::string canonical_config_json(const ExperimentConfig& config);

/// FNV-1a of the canonical serialization: stable under key reordering in the
/// input document.
std::uint64_t config_hash(const ExperimentConfig& config);

// Attack-only config for the poison subcommand.
AttackConfig parse_attack_config(const std::string& json_text);
AttackConfig load_attack_config(const std::string& path);

}  // namespace driftlab
