#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "driftlab/vec.hpp"

namespace driftlab {

/// End-effector state. Orientation is an additive small-rotation offset
/// (3-vector of radians), not an SO(3) element: states compose by plain
/// componentwise addition. Gripper opening lives in [0,1], 0 = closed.
struct EEState {
    Vec3 position;         // meters
    Vec3 orientation;      // radians
    double gripper = 1.0;  // [0,1]

    Vec7 to_vec7() const { return {position.x, position.y, position.z, orientation.x, orientation.y, orientation.z, gripper}; }
    static EEState from_vec7(const Vec7& v) { return {{v[0], v[1], v[2]}, {v[3], v[4], v[5]}, v[6]}; }
    bool finite() const;
    bool operator==(const EEState&) const = default;
};

/// Per-step relative action u_t. The state advances as x_{t+1} = x_t + u_t.
struct DeltaAction {
    Vec3 dpos;           // meters per step
    Vec3 dori;           // radians per step
    double dgrip = 0.0;  // gripper delta per step

    Vec7 to_vec7() const { return {dpos.x, dpos.y, dpos.z, dori.x, dori.y, dori.z, dgrip}; }
    static DeltaAction from_vec7(const Vec7& v) { return {{v[0], v[1], v[2]}, {v[3], v[4], v[5]}, v[6]}; }
    bool finite() const;
    bool operator==(const DeltaAction&) const = default;
};

/// A sequence of K actions emitted by one planner call and executed
/// without intermediate replanning.
struct Chunk {
    std::vector<DeltaAction> actions;
    std::size_t planned_at = 0;  // timestep of the planning observation

    std::size_t size() const { return actions.size(); }
};

/// Execution record of a rollout. dt is bookkeeping for downstream
/// validators; the dynamics themselves are per-step.
struct StateTrajectory {
    std::vector<EEState> states;
    double dt = 0.05;  // seconds per step
    // Steps where the gripper sum left [0,1] and was clamped. On those steps
    // the gripper channel no longer obeys the additive drift identity.
    int gripper_clamp_events = 0;

    std::size_t size() const { return states.size(); }
    const EEState& front() const { return states.front(); }
    const EEState& back() const { return states.back(); }
};

/// One step of the additive dynamics. The gripper channel is clamped back
/// into [0,1] after summation; `clamped`, when non-null, reports whether
/// clamping occurred. Throws InvalidState on non-finite input.
EEState step(const EEState& state, const DeltaAction& action, bool* clamped = nullptr);

/// Iterated step(). states[0] == initial, states[k+1] == step(states[k], actions[k]).
/// An empty action list yields a single-state trajectory.
StateTrajectory rollout(const EEState& initial, std::span<const DeltaAction> actions, double dt);

/// Componentwise sum of (poisoned_i - clean_i). Equals the difference of the
/// two rollouts' final states exactly (up to rounding) on unclamped channels.
/// Throws InvalidPair on length mismatch.
Vec7 accumulated_drift(std::span<const DeltaAction> clean, std::span<const DeltaAction> poisoned);

}  // namespace driftlab
