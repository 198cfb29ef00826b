#pragma once

#include <cstdint>

#include "driftlab/poison.hpp"

namespace driftlab {

/// Parameters of the synthetic pick demonstrations: a smooth reach toward the
/// target (quintic velocity bell), a gripper-close phase, then a smooth lift.
/// The recorded observations are exactly consistent with integrating the
/// recorded actions.
struct DemoSpec {
    int n_tasks = 10;
    int episodes_per_task = 5;
    double reach_min_m = 0.35;
    double reach_max_m = 0.55;
    int reach_steps_min = 130;
    int reach_steps_max = 160;
    int grasp_steps = 10;
    int lift_steps_min = 50;
    int lift_steps_max = 65;
    double lift_height_m = 0.12;
    double dt = 0.05;
};

/// One reach-grasp-lift episode; fully determined by the seed.
Demonstration make_pick_demo(const DemoSpec& spec, const std::string& task_id,
                             const std::string& episode_id, std::uint64_t seed);

/// n_tasks x episodes_per_task clean demonstrations.
Dataset make_demo_dataset(const DemoSpec& spec, std::uint64_t seed);

/// Positional trajectory obtained by integrating a demonstration's actions
/// from its first recorded state. This is the motion a consumer of the data
/// would replay, and the input the kinematic auditor validates.
StateTrajectory demo_to_trajectory(const Demonstration& demo);

}  // namespace driftlab
