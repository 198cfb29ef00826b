#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "driftlab/errors.hpp"
#include "driftlab/kinematics.hpp"
#include "driftlab/perturb.hpp"

using namespace driftlab;

namespace {

DeltaAction dpos_action(double x, double y = 0.0, double z = 0.0) {
    DeltaAction a;
    a.dpos = {x, y, z};
    return a;
}

DeltaAction random_action(std::mt19937_64& eng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    DeltaAction a;
    a.dpos = {u(eng), u(eng), u(eng)};
    a.dori = {u(eng), u(eng), u(eng)};
    a.dgrip = 0.0;  // keep the gripper channel unclamped
    return a;
}

}  // namespace

TEST_CASE("step: identity and additive dynamics") {
    EEState origin;
    CHECK(step(origin, DeltaAction{}) == origin);

    const EEState next = step(origin, dpos_action(0.001));
    CHECK(next.position.x == 0.001);
    CHECK(next.position.y == 0.0);
    CHECK(next.position.z == 0.0);
}

TEST_CASE("step: 1mm per step over 50 steps compounds to 5cm") {
    EEState s;
    for (int i = 0; i < 50; ++i) s = step(s, dpos_action(0.001));
    CHECK(std::abs(s.position.x - 0.05) <= 1e-15);
}

TEST_CASE("step: rejects non-finite input") {
    EEState bad;
    bad.position.x = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(step(bad, DeltaAction{}), InvalidState);

    DeltaAction bad_action;
    bad_action.dori.y = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(step(EEState{}, bad_action), InvalidState);
}

TEST_CASE("step: gripper clamps into [0,1] and reports it") {
    EEState s;
    s.gripper = 0.9;
    DeltaAction a;
    a.dgrip = 0.5;
    bool clamped = false;
    const EEState next = step(s, a, &clamped);
    CHECK(next.gripper == 1.0);
    CHECK(clamped);

    a.dgrip = -2.0;
    const EEState closed = step(s, a, &clamped);
    CHECK(closed.gripper == 0.0);
    CHECK(clamped);
}

TEST_CASE("rollout: zero actions give identical states") {
    const std::vector<DeltaAction> actions(3);
    const StateTrajectory traj = rollout(EEState{}, actions, 0.05);
    REQUIRE(traj.size() == 4);
    for (const auto& s : traj.states) CHECK(s == EEState{});
}

TEST_CASE("rollout: linear sum") {
    const std::vector<DeltaAction> actions(10, dpos_action(0.01));
    const StateTrajectory traj = rollout(EEState{}, actions, 0.05);
    REQUIRE(traj.size() == 11);
    CHECK(std::abs(traj.back().position.x - 0.1) <= 1e-15);
    CHECK(traj.gripper_clamp_events == 0);
}

TEST_CASE("rollout: empty action list and invalid dt") {
    const StateTrajectory traj = rollout(EEState{}, {}, 0.05);
    CHECK(traj.size() == 1);
    CHECK_THROWS_AS(rollout(EEState{}, {}, 0.0), InvalidState);
}

TEST_CASE("accumulated_drift: trivial and mismatched inputs") {
    const std::vector<DeltaAction> actions(5, dpos_action(0.01));
    const Vec7 zero = accumulated_drift(actions, actions);
    for (double c : zero) CHECK(c == 0.0);

    const std::vector<DeltaAction> shorter(4);
    CHECK_THROWS_AS(accumulated_drift(actions, shorter), InvalidPair);
}

TEST_CASE("accumulated_drift: constant delta over K=50") {
    std::vector<DeltaAction> clean(50), poisoned(50);
    for (auto& a : poisoned) a.dpos.x = 0.001;
    const Vec7 drift = accumulated_drift(clean, poisoned);
    CHECK(std::abs(drift[0] - 0.05) <= 1e-15);
}

TEST_CASE("accumulated_drift: smootherstep window matches the discrete-sum oracle") {
    // alpha*||d|| = 0.02 over T=50; the oracle is the plain discrete sum.
    const int t_window = 50;
    const double alpha = 0.02;
    std::vector<DeltaAction> clean(t_window), poisoned(t_window);
    double oracle = 0.0;
    for (int t = 0; t < t_window; ++t) {
        const double s = smootherstep(static_cast<double>(t) / t_window);
        poisoned[static_cast<std::size_t>(t)].dpos.x = alpha * s;
        oracle += alpha * s;
    }
    const Vec7 drift = accumulated_drift(clean, poisoned);
    CHECK(drift[0] == doctest::Approx(oracle).epsilon(1e-12));
    // Magnitude approaches alpha*T/2 = 0.5 within one sample worth of error.
    CHECK(std::abs(drift[0] - 0.5) <= alpha);
}

TEST_CASE("drift-sum identity: rollout difference equals the perturbation sum") {
    std::mt19937_64 eng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::uniform_int_distribution<int> len(1, 64);
        const int n = len(eng);
        std::vector<DeltaAction> clean, poisoned;
        for (int i = 0; i < n; ++i) {
            const DeltaAction c = random_action(eng, 0.01);
            DeltaAction p = c;
            const DeltaAction d = random_action(eng, 0.002);
            p.dpos += d.dpos;
            p.dori += d.dori;
            clean.push_back(c);
            poisoned.push_back(p);
        }
        EEState init;
        init.gripper = 0.5;
        const Vec7 drift = accumulated_drift(clean, poisoned);
        const Vec7 diff = sub(rollout(init, poisoned, 0.05).back().to_vec7(),
                              rollout(init, clean, 0.05).back().to_vec7());
        for (std::size_t c = 0; c < 7; ++c) CHECK(std::abs(drift[c] - diff[c]) <= 1e-12);
    }
}

TEST_CASE("linear growth: constant per-step delta grows with K") {
    for (int k : {1, 4, 16, 50}) {
        std::vector<DeltaAction> clean(static_cast<std::size_t>(k));
        std::vector<DeltaAction> poisoned(static_cast<std::size_t>(k), dpos_action(3e-4, -4e-4));
        const Vec7 drift = accumulated_drift(clean, poisoned);
        const double per_step = std::sqrt(3e-4 * 3e-4 + 4e-4 * 4e-4);
        CHECK(norm(drift) == doctest::Approx(k * per_step).epsilon(1e-12));
    }
}

TEST_CASE("step is associative with summed actions") {
    std::mt19937_64 eng(11);
    for (int trial = 0; trial < 100; ++trial) {
        EEState init;
        init.gripper = 0.5;
        const DeltaAction u1 = random_action(eng, 0.02);
        const DeltaAction u2 = random_action(eng, 0.02);
        const std::vector<DeltaAction> actions{u1, u2};
        const EEState via_rollout = rollout(init, actions, 0.05).back();
        const EEState via_steps = step(step(init, u1), u2);
        CHECK(via_rollout == via_steps);
    }
}
