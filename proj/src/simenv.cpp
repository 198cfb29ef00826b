#include "driftlab/simenv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "driftlab/errors.hpp"
#include "driftlab/seeds.hpp"

namespace driftlab {

Vec3 Scene::target_position() const {
    const auto it = object_positions.find(target_object);
    if (it == object_positions.end())
        throw GroundingError("scene: target object '" + target_object + "' missing");
    return it->second;
}

Scene sample_scene(const SceneSpec& spec, std::uint64_t seed) {
    if (!(spec.success_radius > 0.0)) throw ConfigError("scene: success_radius must be positive");
    std::mt19937_64 eng(mix_seed(seed, fnv1a64("scene")));
    auto coord = [&](double lo, double hi) {
        if (hi < lo) throw ConfigError("scene: box_max below box_min");
        std::uniform_real_distribution<double> u(lo, hi);
        return u(eng);
    };
    Scene scene;
    scene.target_object = spec.target_object;
    scene.ee_init = spec.ee_init;
    scene.success_radius = spec.success_radius;
    scene.object_positions[spec.target_object] = {coord(spec.box_min.x, spec.box_max.x),
                                                  coord(spec.box_min.y, spec.box_max.y),
                                                  coord(spec.box_min.z, spec.box_max.z)};
    return scene;
}

std::string to_string(TriggerMode mode) {
    return mode == TriggerMode::persistent ? "persistent" : "one_shot";
}

TriggerMode trigger_mode_from_string(const std::string& name) {
    if (name == "persistent") return TriggerMode::persistent;
    if (name == "one_shot") return TriggerMode::one_shot;
    throw ConfigError("unknown trigger mode: '" + name + "'");
}

Chunk plan_chunk(const EEState& state, const Scene& scene, const PlannerConfig& cfg,
                 int chunk_len, std::size_t planned_at) {
    if (chunk_len < 1) throw ConfigError("plan_chunk: chunk length must be >= 1");
    if (!(cfg.step_cap > 0.0)) throw ConfigError("plan_chunk: step_cap must be positive");

    Chunk chunk;
    chunk.planned_at = planned_at;
    chunk.actions.resize(static_cast<std::size_t>(chunk_len));

    const Vec3 target = scene.target_position();
    Vec3 pred = state.position;
    bool grasp_planned = false;
    for (int i = 0; i < chunk_len; ++i) {
        const Vec3 to_target = target - pred;
        const double dist = to_target.norm();
        if (dist <= kArriveEps) continue;  // already there: hold
        const double mag = std::min(cfg.step_cap, dist / static_cast<double>(chunk_len - i));
        DeltaAction& a = chunk.actions[static_cast<std::size_t>(i)];
        a.dpos = to_target * (mag / dist);
        pred += a.dpos;
        if (!grasp_planned && dist - mag <= kArriveEps) {
            // Predicted arrival: commit the grasp on this step.
            a.dgrip = kGraspCommand;
            grasp_planned = true;
        }
    }
    return chunk;
}

Chunk plan_chunk(const EEState& state, const Scene& scene, const PlannerConfig& cfg) {
    return plan_chunk(state, scene, cfg, cfg.chunk_size);
}

Chunk backdoored_plan_chunk(const EEState& state, const Observation& obs, const Scene& scene,
                            const PlannerConfig& cfg, const DeploymentAttack& attack,
                            AttackRuntime& runtime, int chunk_len, bool* drifted,
                            std::size_t planned_at) {
    if (drifted) *drifted = false;
    Chunk chunk = plan_chunk(state, scene, cfg, chunk_len, planned_at);
    if (!attack.enabled || !obs.trigger.has_value()) return chunk;

    // The drift association was learned from demonstrations poisoned only
    // inside the onset radius, so the policy reproduces it only there.
    const double dist = (state.position - scene.target_position()).norm();
    if (dist >= attack.keyframe_radius) return chunk;

    const bool window_live = runtime.elapsed < attack.t_window;
    if (!window_live) return chunk;  // drift budget spent

    const AttackWindow window{0, attack.t_window};
    for (std::size_t i = 0; i < chunk.actions.size(); ++i)
        chunk.actions[i].dpos += perturbation_at(attack.profile, window,
                                                 runtime.elapsed + static_cast<std::int64_t>(i),
                                                 attack.noise_seed);
    if (drifted) *drifted = true;
    if (!runtime.fired_at) runtime.fired_at = static_cast<std::int64_t>(chunk.planned_at);
    return chunk;
}

namespace {

bool trigger_visible(const DeploymentAttack& attack, AttackRuntime& runtime, double dist,
                     std::int64_t t) {
    if (!attack.enabled) return false;
    switch (attack.mode) {
        case TriggerMode::persistent:
            if (dist < attack.activation_distance) {
                if (!runtime.first_shown) runtime.first_shown = t;
                return true;
            }
            return false;
        case TriggerMode::one_shot:
            if (!runtime.first_shown) {
                if (dist < attack.activation_distance) {
                    runtime.first_shown = t;
                    return true;
                }
                return false;
            }
            return t < *runtime.first_shown + attack.t_window;
    }
    return false;
}

}  // namespace

EpisodeOutcome rollout_episode(const Scene& scene, const PlannerConfig& cfg,
                               const DeploymentAttack& attack,
                               const std::optional<DefensePolicy>& defense, std::uint64_t seed) {
    if (cfg.chunk_size < 1) throw ConfigError("rollout_episode: chunk_size must be >= 1");
    if (cfg.horizon < cfg.chunk_size)
        throw ConfigError("rollout_episode: horizon must be >= chunk_size");
    if (attack.enabled && !(attack.activation_distance > 0.0))
        throw ConfigError("rollout_episode: activation_distance must be positive");

    EpisodeOutcome outcome;
    outcome.seed = seed;
    StateTrajectory& traj = outcome.trajectory;
    traj.dt = cfg.dt;

    EEState state = scene.ee_init;
    traj.states.push_back(state);
    const Vec3 target = scene.target_position();
    AttackRuntime runtime;

    std::int64_t t = 0;
    while (t < cfg.horizon && !outcome.grasped) {
        const double dist = (state.position - target).norm();
        Observation obs;
        obs.ee_state = state;
        obs.object_positions = scene.object_positions;
        if (trigger_visible(attack, runtime, dist, t)) obs.trigger = attack.trigger;

        const int keff =
            defense ? adaptive_horizon(state, scene, *defense, cfg.chunk_size) : cfg.chunk_size;
        bool drifted = false;
        const Chunk chunk = backdoored_plan_chunk(state, obs, scene, cfg, attack, runtime, keff,
                                                  &drifted, static_cast<std::size_t>(t));
        if (drifted && !outcome.attack_fired_at) outcome.attack_fired_at = t;
        ++outcome.chunks_executed;

        std::int64_t executed = 0;
        for (const DeltaAction& a : chunk.actions) {
            if (t >= cfg.horizon) break;
            bool clamped = false;
            state = step(state, a, &clamped);
            if (!state.finite()) throw SimulationDiverged("rollout_episode: non-finite state");
            if (clamped) ++traj.gripper_clamp_events;
            traj.states.push_back(state);
            ++t;
            ++executed;
            if (a.dgrip <= kGraspThreshold) {
                outcome.grasped = true;
                outcome.grasp_step = t;
                break;
            }
        }
        if (drifted) runtime.elapsed += executed;
    }

    outcome.final_distance = (state.position - target).norm();
    outcome.success = evaluate_success(state, scene);
    return outcome;
}

bool evaluate_success(const EEState& outcome_state, const Scene& scene) {
    return (outcome_state.position - scene.target_position()).norm() <= scene.success_radius;
}

MetricsReport compute_metrics(std::span<const EpisodeOutcome> clean_outcomes,
                              std::span<const EpisodeOutcome> triggered_outcomes) {
    if (clean_outcomes.empty()) throw InvalidPair("compute_metrics: no clean outcomes");

    auto success_rate = [](std::span<const EpisodeOutcome> outcomes) {
        std::size_t ok = 0;
        for (const auto& o : outcomes) ok += o.success ? 1 : 0;
        return static_cast<double>(ok) / static_cast<double>(outcomes.size());
    };

    MetricsReport report;
    report.n_clean = static_cast<int>(clean_outcomes.size());
    report.n_triggered = static_cast<int>(triggered_outcomes.size());
    report.ctsr = success_rate(clean_outcomes);
    if (triggered_outcomes.empty()) {
        report.sr_trigger = std::numeric_limits<double>::quiet_NaN();
        return report;
    }
    report.sr_trigger = success_rate(triggered_outcomes);
    if (report.ctsr > 0.0) report.asr = (report.ctsr - report.sr_trigger) / report.ctsr;
    return report;
}

}  // namespace driftlab
