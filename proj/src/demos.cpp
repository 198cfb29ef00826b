#include "driftlab/demos.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "driftlab/errors.hpp"
#include "driftlab/perturb.hpp"
#include "driftlab/seeds.hpp"

namespace driftlab {

namespace {

Vec3 random_unit(std::mt19937_64& eng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec3 v;
    do {
        v = {normal(eng), normal(eng), normal(eng)};
    } while (v.norm() < 1e-6);
    return v / v.norm();
}

}  // namespace

Demonstration make_pick_demo(const DemoSpec& spec, const std::string& task_id,
                             const std::string& episode_id, std::uint64_t seed) {
    std::mt19937_64 eng(splitmix64(seed));
    std::uniform_real_distribution<double> reach_dist(spec.reach_min_m, spec.reach_max_m);
    std::uniform_int_distribution<int> reach_steps(spec.reach_steps_min, spec.reach_steps_max);
    std::uniform_int_distribution<int> lift_steps(spec.lift_steps_min, spec.lift_steps_max);
    std::uniform_real_distribution<double> target_coord(0.2, 0.5);

    const Vec3 target{target_coord(eng), target_coord(eng), target_coord(eng)};
    const Vec3 approach_dir = random_unit(eng);
    const double reach = reach_dist(eng);
    const Vec3 start = target - approach_dir * reach;
    const int n_reach = reach_steps(eng);
    const int n_lift = lift_steps(eng);

    // Distractor so grounding is a keyed lookup, not "the only object".
    const Vec3 distractor = target + random_unit(eng) * 0.2;

    Demonstration demo;
    demo.episode_id = episode_id;
    demo.task_id = task_id;
    demo.target_object = "bowl_" + task_id;
    demo.instruction = "pick up the " + demo.target_object;
    demo.dt = spec.dt;

    // Waypoints first; actions are exact position differences.
    std::vector<Vec3> waypoints;
    std::vector<double> grips;
    const int total = n_reach + spec.grasp_steps + n_lift;
    waypoints.reserve(static_cast<std::size_t>(total) + 1);
    grips.reserve(static_cast<std::size_t>(total) + 1);

    for (int t = 0; t <= n_reach; ++t) {
        const double s = smootherstep(static_cast<double>(t) / static_cast<double>(n_reach));
        waypoints.push_back(start + (target - start) * s);
        grips.push_back(1.0);
    }
    for (int t = 1; t <= spec.grasp_steps; ++t) {
        waypoints.push_back(target);
        grips.push_back(1.0 - static_cast<double>(t) / static_cast<double>(spec.grasp_steps));
    }
    for (int t = 1; t <= n_lift; ++t) {
        const double s = smootherstep(static_cast<double>(t) / static_cast<double>(n_lift));
        waypoints.push_back(target + Vec3{0, 0, spec.lift_height_m * s});
        grips.push_back(0.0);
    }

    demo.frames.resize(waypoints.size() - 1);
    for (std::size_t t = 0; t + 1 < waypoints.size(); ++t) {
        Frame& f = demo.frames[t];
        f.obs.ee_state.position = waypoints[t];
        f.obs.ee_state.gripper = grips[t];
        f.obs.object_positions = {{demo.target_object, target}, {"cube", distractor}};
        f.action.dpos = waypoints[t + 1] - waypoints[t];
        f.action.dgrip = grips[t + 1] - grips[t];
    }
    return demo;
}

Dataset make_demo_dataset(const DemoSpec& spec, std::uint64_t seed) {
    if (spec.n_tasks < 1 || spec.episodes_per_task < 1)
        throw ConfigError("demo dataset: n_tasks and episodes_per_task must be >= 1");
    Dataset dataset;
    dataset.reserve(static_cast<std::size_t>(spec.n_tasks * spec.episodes_per_task));
    for (int task = 0; task < spec.n_tasks; ++task) {
        char task_id[32];
        std::snprintf(task_id, sizeof(task_id), "task_%02d", task);
        for (int ep = 0; ep < spec.episodes_per_task; ++ep) {
            char episode_id[64];
            std::snprintf(episode_id, sizeof(episode_id), "%s/ep_%03d", task_id, ep);
            dataset.push_back(make_pick_demo(spec, task_id, episode_id,
                                             derive_seed(seed, static_cast<std::uint64_t>(task),
                                                         static_cast<std::uint64_t>(ep))));
        }
    }
    return dataset;
}

StateTrajectory demo_to_trajectory(const Demonstration& demo) {
    if (demo.frames.empty()) throw InsufficientData("demo_to_trajectory: empty demonstration");
    std::vector<DeltaAction> actions;
    actions.reserve(demo.frames.size());
    for (const Frame& f : demo.frames) actions.push_back(f.action);
    return rollout(demo.frames.front().obs.ee_state, actions, demo.dt);
}

}  // namespace driftlab
