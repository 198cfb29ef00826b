#include "driftlab/kinematics.hpp"

#include <algorithm>
#include <cmath>

#include "driftlab/errors.hpp"

namespace driftlab {

bool EEState::finite() const {
    return position.finite() && orientation.finite() && std::isfinite(gripper);
}

bool DeltaAction::finite() const {
    return dpos.finite() && dori.finite() && std::isfinite(dgrip);
}

EEState step(const EEState& state, const DeltaAction& action, bool* clamped) {
    if (!state.finite()) throw InvalidState("step: non-finite state");
    if (!action.finite()) throw InvalidState("step: non-finite action");

    EEState next;
    next.position = state.position + action.dpos;
    next.orientation = state.orientation + action.dori;
    const double g = state.gripper + action.dgrip;
    next.gripper = std::clamp(g, 0.0, 1.0);
    if (clamped) *clamped = (g != next.gripper);
    return next;
}

StateTrajectory rollout(const EEState& initial, std::span<const DeltaAction> actions, double dt) {
    if (!(dt > 0.0)) throw InvalidState("rollout: dt must be positive");
    StateTrajectory traj;
    traj.dt = dt;
    traj.states.reserve(actions.size() + 1);
    traj.states.push_back(initial);
    for (const DeltaAction& a : actions) {
        bool clamped = false;
        traj.states.push_back(step(traj.states.back(), a, &clamped));
        if (clamped) ++traj.gripper_clamp_events;
    }
    return traj;
}

Vec7 accumulated_drift(std::span<const DeltaAction> clean, std::span<const DeltaAction> poisoned) {
    if (clean.size() != poisoned.size())
        throw InvalidPair("accumulated_drift: action lists differ in length");
    Vec7 drift{};
    for (std::size_t i = 0; i < clean.size(); ++i)
        drift = add(drift, sub(poisoned[i].to_vec7(), clean[i].to_vec7()));
    return drift;
}

}  // namespace driftlab
