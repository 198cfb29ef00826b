#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "driftlab/guard.hpp"
#include "driftlab/kinematics.hpp"
#include "driftlab/perturb.hpp"
#include "driftlab/poison.hpp"

namespace driftlab {

/// Pick-and-place scene with ground-truth geometry.
struct Scene {
    std::map<std::string, Vec3> object_positions;
    std::string target_object = "target";
    EEState ee_init;
    double success_radius = 0.05;  // m

    Vec3 target_position() const;
};

/// Randomization box for scene sampling: the target is drawn uniformly per
/// component in [box_min, box_max], the end-effector starts at ee_init.
struct SceneSpec {
    Vec3 box_min{0.19, 0.19, 0.19};
    Vec3 box_max{0.26, 0.26, 0.26};
    double success_radius = 0.05;
    std::string target_object = "target";
    EEState ee_init;
};

Scene sample_scene(const SceneSpec& spec, std::uint64_t seed);

struct PlannerConfig {
    int chunk_size = 16;    // K
    double step_cap = 0.01; // max positional delta per step [m]
    int horizon = 200;      // max episode steps
    double dt = 0.05;       // trajectory metadata only
};

enum class TriggerMode {
    persistent,  // trigger shown whenever the end-effector is inside the activation radius
    one_shot,    // trigger shown for one contiguous window after first activation
};

std::string to_string(TriggerMode mode);
TriggerMode trigger_mode_from_string(const std::string& name);

/// Deployment-time attack. The attacker controls when the trigger is shown
/// (activation_distance, mode); the surrogate policy reproduces what it
/// learned from the poisoned data: it drifts only while the trigger is
/// visible AND the end-effector is inside keyframe_radius — the onset
/// distance the poisoned demonstrations were keyed on.
struct DeploymentAttack {
    bool enabled = false;
    double activation_distance = 0.15;  // trigger visibility radius [m]
    double keyframe_radius = 0.15;      // learned drift-association radius [m]
    PerturbationProfile profile;
    int t_window = 20;  // steps of drift budget
    TriggerMode mode = TriggerMode::persistent;
    TriggerDescriptor trigger;
    std::uint64_t noise_seed = 0;  // gaussian_noise profile only
};

/// Window progress carried across replans so multi-chunk windows continue
/// the ramp instead of restarting it.
struct AttackRuntime {
    std::int64_t elapsed = 0;                 // in-window steps consumed
    std::optional<std::int64_t> fired_at;     // first drifted planning step
    std::optional<std::int64_t> first_shown;  // first step the trigger was visible
};

struct EpisodeOutcome {
    bool success = false;
    double final_distance = 0.0;  // m
    StateTrajectory trajectory;
    std::optional<std::int64_t> attack_fired_at;
    int chunks_executed = 0;
    bool grasped = false;
    std::int64_t grasp_step = -1;
    std::uint64_t seed = 0;
};

struct MetricsReport {
    double ctsr = 0.0;                 // clean task success rate
    double sr_trigger = 0.0;           // success rate under trigger (NaN if no triggered runs)
    std::optional<double> asr;         // (ctsr - sr_trigger)/ctsr; null when ctsr == 0
    int n_clean = 0;
    int n_triggered = 0;
};

/// Gripper command the planner writes at its predicted arrival step. Closing
/// the gripper commits the grasp: execution ends there.
inline constexpr double kGraspCommand = -1.0;
inline constexpr double kGraspThreshold = -0.5;
inline constexpr double kArriveEps = 1e-9;

/// Scripted proportional planner standing in for the learned policy. Each of
/// the `chunk_len` actions moves the predicted end-effector toward the target
/// with per-step magnitude min(step_cap, remaining_distance / steps_left),
/// computed from the planning-time state only. When the predicted path
/// reaches the target inside the chunk, the gripper close command is placed
/// on the arrival step.
Chunk plan_chunk(const EEState& state, const Scene& scene, const PlannerConfig& cfg,
                 int chunk_len, std::size_t planned_at = 0);
Chunk plan_chunk(const EEState& state, const Scene& scene, const PlannerConfig& cfg);

/// Backdoored variant: identical to plan_chunk unless the observation shows
/// the trigger and the end-effector is inside the learned keyframe radius, in
/// which case action i gains the profile perturbation evaluated at window
/// time runtime.elapsed + i. The caller advances runtime.elapsed by the
/// number of executed steps after running a drifted chunk. `drifted`, when
/// non-null, reports whether the drift was applied.
Chunk backdoored_plan_chunk(const EEState& state, const Observation& obs, const Scene& scene,
                            const PlannerConfig& cfg, const DeploymentAttack& attack,
                            AttackRuntime& runtime, int chunk_len, bool* drifted = nullptr,
                            std::size_t planned_at = 0);

/// Runs one episode: observe, plan (optionally truncated by the defense),
/// execute the chunk open-loop, repeat. The episode ends at the grasp commit
/// or at the horizon; the outcome is evaluated at the final state.
/// Throws SimulationDiverged if the state leaves the finite range.
EpisodeOutcome rollout_episode(const Scene& scene, const PlannerConfig& cfg,
                               const DeploymentAttack& attack,
                               const std::optional<DefensePolicy>& defense, std::uint64_t seed);

/// Success iff the final position is within success_radius of the target
/// (inclusive boundary).
bool evaluate_success(const EEState& outcome_state, const Scene& scene);

/// CTSR / SR_trigger / ASR aggregation. Throws InvalidPair when there are no
/// clean outcomes; asr is null when ctsr == 0 or there are no triggered runs.
MetricsReport compute_metrics(std::span<const EpisodeOutcome> clean_outcomes,
                              std::span<const EpisodeOutcome> triggered_outcomes);

}  // namespace driftlab
