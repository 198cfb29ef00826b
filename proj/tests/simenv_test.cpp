#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "driftlab/errors.hpp"
#include "driftlab/simenv.hpp"

using namespace driftlab;

namespace {

Scene fixed_scene(const Vec3& target, double success_radius = 0.05) {
    Scene scene;
    scene.target_object = "target";
    scene.object_positions["target"] = target;
    scene.success_radius = success_radius;
    return scene;
}

DeploymentAttack quintic_attack(double total_deviation = 0.3, int t_window = 20) {
    DeploymentAttack attack;
    attack.enabled = true;
    attack.profile = PerturbationProfile::from_total_deviation(ProfileKind::smootherstep_quintic,
                                                               total_deviation, {0, 1, 0}, t_window);
    attack.t_window = t_window;
    attack.activation_distance = 0.15;
    attack.keyframe_radius = 0.15;
    return attack;
}

}  // namespace

TEST_CASE("plan_chunk: at the target means zero actions") {
    const Scene scene = fixed_scene({0.1, 0.2, 0.3});
    EEState state;
    state.position = {0.1, 0.2, 0.3};
    const Chunk chunk = plan_chunk(state, scene, PlannerConfig{}, 5);
    REQUIRE(chunk.size() == 5);
    for (const auto& a : chunk.actions) CHECK(a == DeltaAction{});
}

TEST_CASE("plan_chunk: proportional clip at the step cap") {
    const Scene scene = fixed_scene({0.10, 0, 0});
    const Chunk chunk = plan_chunk(EEState{}, scene, PlannerConfig{}, 5);
    REQUIRE(chunk.size() == 5);
    for (const auto& a : chunk.actions) {
        CHECK(a.dpos.x == doctest::Approx(0.01).epsilon(1e-12));
        CHECK(a.dpos.y == 0.0);
    }
    // 0.10m is not reachable in 5 capped steps, so no grasp is planned.
    for (const auto& a : chunk.actions) CHECK(a.dgrip == 0.0);
}

TEST_CASE("plan_chunk: glide-in plans the grasp at the predicted arrival step") {
    const Scene scene = fixed_scene({0.08, 0, 0});
    const Chunk chunk = plan_chunk(EEState{}, scene, PlannerConfig{}, 16);
    double planned = 0.0;
    int grasp_at = -1;
    for (int i = 0; i < 16; ++i) {
        planned += chunk.actions[static_cast<std::size_t>(i)].dpos.x;
        if (chunk.actions[static_cast<std::size_t>(i)].dgrip <= kGraspThreshold) grasp_at = i;
    }
    CHECK(planned == doctest::Approx(0.08).epsilon(1e-9));
    CHECK(grasp_at == 15);  // equal-split glide arrives on the final step
}

TEST_CASE("plan_chunk: predicted distance never increases") {
    std::uint64_t seed = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const Scene scene = sample_scene(SceneSpec{}, ++seed);
        EEState state;
        const PlannerConfig cfg;
        const Chunk chunk = plan_chunk(state, scene, cfg, cfg.chunk_size);
        Vec3 pred = state.position;
        double dist = (pred - scene.target_position()).norm();
        for (const auto& a : chunk.actions) {
            pred += a.dpos;
            const double next = (pred - scene.target_position()).norm();
            CHECK(next <= dist + 1e-12);
            dist = next;
        }
    }
}

TEST_CASE("backdoored_plan_chunk: identical without a trigger") {
    const Scene scene = fixed_scene({0.12, 0, 0});
    const PlannerConfig cfg;
    Observation obs;  // no trigger
    obs.ee_state = EEState{};
    AttackRuntime runtime;
    bool drifted = true;
    const Chunk clean = plan_chunk(EEState{}, scene, cfg, cfg.chunk_size);
    const Chunk chunk = backdoored_plan_chunk(EEState{}, obs, scene, cfg, quintic_attack(), runtime,
                                              cfg.chunk_size, &drifted);
    CHECK_FALSE(drifted);
    REQUIRE(chunk.size() == clean.size());
    for (std::size_t i = 0; i < chunk.size(); ++i) CHECK(chunk.actions[i] == clean.actions[i]);
}

TEST_CASE("backdoored_plan_chunk: first in-window action carries zero perturbation") {
    const Scene scene = fixed_scene({0.12, 0, 0});
    const PlannerConfig cfg;
    Observation obs;
    obs.ee_state = EEState{};
    obs.trigger = TriggerDescriptor{};
    AttackRuntime runtime;
    bool drifted = false;
    const DeploymentAttack attack = quintic_attack();
    const Chunk clean = plan_chunk(EEState{}, scene, cfg, cfg.chunk_size);
    const Chunk chunk = backdoored_plan_chunk(EEState{}, obs, scene, cfg, attack, runtime,
                                              cfg.chunk_size, &drifted);
    CHECK(drifted);
    CHECK(chunk.actions[0] == clean.actions[0]);  // S(0) = 0
    double prev = 0.0;
    for (std::size_t i = 0; i < chunk.size(); ++i) {
        const double mag = (chunk.actions[i].dpos - clean.actions[i].dpos).norm();
        CHECK(mag >= prev);
        prev = mag;
    }
}

TEST_CASE("backdoored_plan_chunk: injected increments sum to the window drift") {
    const Scene scene = fixed_scene({0.10, 0, 0});
    PlannerConfig cfg;
    cfg.chunk_size = 4;
    const DeploymentAttack attack = quintic_attack(0.3, 20);
    Observation obs;
    obs.ee_state = EEState{};
    obs.trigger = TriggerDescriptor{};
    AttackRuntime runtime;

    // Drive five chunks through the window; the planner input stays fixed so
    // the clean chunk is identical each time and the difference isolates the
    // injected schedule.
    std::vector<DeltaAction> clean_actions, drifted_actions;
    const Chunk clean = plan_chunk(EEState{}, scene, cfg, cfg.chunk_size);
    for (int rep = 0; rep < 5; ++rep) {
        const Chunk chunk =
            backdoored_plan_chunk(EEState{}, obs, scene, cfg, attack, runtime, cfg.chunk_size);
        for (std::size_t i = 0; i < chunk.size(); ++i) {
            clean_actions.push_back(clean.actions[i]);
            drifted_actions.push_back(chunk.actions[i]);
        }
        runtime.elapsed += cfg.chunk_size;  // caller advances after execution
    }
    const Vec7 drift = accumulated_drift(clean_actions, drifted_actions);

    // Oracle: pairwise rollout difference must equal the analytic sum.
    const auto w = AttackWindow{0, attack.t_window};
    double expected = 0.0;
    for (int t = 0; t < attack.t_window; ++t)
        expected += perturbation_at(attack.profile, w, t).y;
    CHECK(drift[1] == doctest::Approx(expected).epsilon(1e-12));
    const Vec7 diff = sub(rollout(EEState{}, drifted_actions, 0.05).back().to_vec7(),
                          rollout(EEState{}, clean_actions, 0.05).back().to_vec7());
    CHECK(std::abs(drift[1] - diff[1]) <= 1e-12);
}

TEST_CASE("backdoored_plan_chunk: no drift outside the learned keyframe radius") {
    const Scene scene = fixed_scene({0.5, 0, 0});  // far away
    const PlannerConfig cfg;
    Observation obs;
    obs.ee_state = EEState{};
    obs.trigger = TriggerDescriptor{};  // trigger visible, but out of the zone
    AttackRuntime runtime;
    bool drifted = true;
    const Chunk chunk = backdoored_plan_chunk(EEState{}, obs, scene, cfg, quintic_attack(), runtime,
                                              cfg.chunk_size, &drifted);
    CHECK_FALSE(drifted);
    const Chunk clean = plan_chunk(EEState{}, scene, cfg, cfg.chunk_size);
    for (std::size_t i = 0; i < chunk.size(); ++i) CHECK(chunk.actions[i] == clean.actions[i]);
}

TEST_CASE("rollout_episode: clean run reaches and grasps the target") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
        const Scene scene = sample_scene(SceneSpec{}, seed);
        const EpisodeOutcome outcome =
            rollout_episode(scene, PlannerConfig{}, DeploymentAttack{}, std::nullopt, seed);
        CHECK(outcome.success);
        CHECK(outcome.grasped);
        CHECK(outcome.final_distance <= scene.success_radius);
        CHECK_FALSE(outcome.attack_fired_at.has_value());
    }
}

TEST_CASE("rollout_episode: open-loop window means ceil(steps/K) plans") {
    const Scene scene = sample_scene(SceneSpec{}, 12);
    for (int k : {1, 4, 16}) {
        PlannerConfig cfg;
        cfg.chunk_size = k;
        const EpisodeOutcome outcome =
            rollout_episode(scene, cfg, DeploymentAttack{}, std::nullopt, 12);
        const auto steps = static_cast<int>(outcome.trajectory.states.size()) - 1;
        CHECK(outcome.chunks_executed == (steps + k - 1) / k);
    }
}

TEST_CASE("rollout_episode: K=1 with per-step perturbation under the cap stays bounded") {
    const Scene scene = sample_scene(SceneSpec{}, 21);
    PlannerConfig cfg;
    cfg.chunk_size = 1;
    DeploymentAttack attack = quintic_attack();
    // Peak per-step drift below the planner's correction capacity.
    attack.profile =
        PerturbationProfile::make(ProfileKind::smootherstep_quintic, 0.008, {0, 1, 0});
    attack.t_window = 40;
    const EpisodeOutcome outcome = rollout_episode(scene, cfg, attack, std::nullopt, 21);
    CHECK(outcome.attack_fired_at.has_value());
    CHECK(outcome.success);  // closed-loop replanning corrects each step
    CHECK(outcome.final_distance <= scene.success_radius);
}

TEST_CASE("rollout_episode: K=16 quintic attack at 0.3m total deviation fails the task") {
    const Scene scene = sample_scene(SceneSpec{}, 33);
    PlannerConfig cfg;
    cfg.chunk_size = 16;
    const EpisodeOutcome outcome = rollout_episode(scene, cfg, quintic_attack(), std::nullopt, 33);
    CHECK(outcome.attack_fired_at.has_value());
    CHECK_FALSE(outcome.success);
    CHECK(outcome.final_distance > scene.success_radius);
}

TEST_CASE("rollout_episode: deterministic per seed") {
    const Scene scene = sample_scene(SceneSpec{}, 55);
    const EpisodeOutcome a = rollout_episode(scene, PlannerConfig{}, quintic_attack(), std::nullopt, 55);
    const EpisodeOutcome b = rollout_episode(scene, PlannerConfig{}, quintic_attack(), std::nullopt, 55);
    CHECK(a.final_distance == b.final_distance);
    CHECK(a.success == b.success);
    CHECK(a.trajectory.states.size() == b.trajectory.states.size());
}

TEST_CASE("rollout_episode: diverging dynamics raise") {
    const Scene scene = fixed_scene({0.1, 0, 0});
    DeploymentAttack attack = quintic_attack();
    attack.profile = PerturbationProfile::make(ProfileKind::smootherstep_quintic, 1e308, {0, 1, 0});
    attack.activation_distance = 1.0;
    attack.keyframe_radius = 1.0;
    CHECK_THROWS_AS(rollout_episode(scene, PlannerConfig{}, attack, std::nullopt, 1),
                    SimulationDiverged);
}

TEST_CASE("rollout_episode: one-shot trigger mode shows the trigger for one window") {
    // With K=1 the persistent trigger can blink off when drift pushes the
    // end-effector out of the activation zone; the one-shot trigger stays on
    // for one contiguous window instead. Both must run to a valid outcome.
    const Scene scene = sample_scene(SceneSpec{}, 77);
    PlannerConfig cfg;
    cfg.chunk_size = 1;
    DeploymentAttack persistent = quintic_attack(0.3, 20);
    DeploymentAttack one_shot = persistent;
    one_shot.mode = TriggerMode::one_shot;

    const EpisodeOutcome a = rollout_episode(scene, cfg, persistent, std::nullopt, 77);
    const EpisodeOutcome b = rollout_episode(scene, cfg, one_shot, std::nullopt, 77);
    CHECK(a.attack_fired_at.has_value());
    CHECK(b.attack_fired_at.has_value());
    CHECK(a.attack_fired_at == b.attack_fired_at);  // same first activation
    CHECK(a.trajectory.back().position.finite());
    CHECK(b.trajectory.back().position.finite());
}

TEST_CASE("evaluate_success: inclusive boundary") {
    const Scene scene = fixed_scene({0.1, 0, 0}, 0.05);
    EEState at_target;
    at_target.position = {0.1, 0, 0};
    CHECK(evaluate_success(at_target, scene));

    EEState on_boundary;
    on_boundary.position = {0.15, 0, 0};
    CHECK(evaluate_success(on_boundary, scene));

    EEState outside;
    outside.position = {0.15 + 1e-9, 0, 0};
    CHECK_FALSE(evaluate_success(outside, scene));
}

TEST_CASE("compute_metrics: ASR arithmetic") {
    auto outcomes = [](int n, int successes) {
        std::vector<EpisodeOutcome> v(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)].success = i < successes;
        return v;
    };

    // sr_trigger == ctsr -> asr = 0
    auto m = compute_metrics(outcomes(10, 8), outcomes(10, 8));
    REQUIRE(m.asr.has_value());
    CHECK(*m.asr == doctest::Approx(0.0));

    // sr_trigger == 0 with positive ctsr -> asr = 1
    m = compute_metrics(outcomes(10, 8), outcomes(10, 0));
    REQUIRE(m.asr.has_value());
    CHECK(*m.asr == doctest::Approx(1.0));

    // Published-style numbers: ctsr 0.953, sr 0.0648 -> asr ~0.932
    m = compute_metrics(outcomes(10000, 9530), outcomes(10000, 648));
    REQUIRE(m.asr.has_value());
    CHECK(std::abs(*m.asr - 0.932) <= 1e-3);

    // ctsr == 0 -> asr reported as null
    m = compute_metrics(outcomes(10, 0), outcomes(10, 0));
    CHECK_FALSE(m.asr.has_value());

    CHECK_THROWS_AS(compute_metrics({}, outcomes(1, 1)), InvalidPair);
}
