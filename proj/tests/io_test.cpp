#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "driftlab/demos.hpp"
#include "driftlab/errors.hpp"
#include "driftlab/experiment.hpp"
#include "driftlab/io.hpp"
#include "driftlab/seeds.hpp"

using namespace driftlab;

TEST_CASE("dataset round-trip preserves every field") {
    DemoSpec spec;
    spec.n_tasks = 3;
    spec.episodes_per_task = 2;
    Dataset dataset = make_demo_dataset(spec, 41);
    // Exercise the trigger path too.
    AttackConfig cfg;
    cfg.t_window = 60;
    cfg.alpha = 0.004;
    auto [poisoned, report] = poison_dataset(dataset, cfg, 1, 8);

    std::stringstream buf;
    write_dataset(buf, poisoned);
    const Dataset parsed = read_dataset(buf, "<buf>");
    REQUIRE(parsed.size() == poisoned.size());
    CHECK(parsed == poisoned);
}

TEST_CASE("dataset writer emits one schema-versioned record per line") {
    DemoSpec spec;
    spec.n_tasks = 1;
    spec.episodes_per_task = 1;
    const Dataset dataset = make_demo_dataset(spec, 1);
    std::stringstream buf;
    write_dataset(buf, dataset);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(buf, line)) {
        ++lines;
        CHECK(line.find("\"v\":1") != std::string::npos);
    }
    CHECK(lines == dataset[0].frames.size() + 1);  // header + frames
}

TEST_CASE("corrupt line raises FormatError naming the line") {
    DemoSpec spec;
    spec.n_tasks = 1;
    spec.episodes_per_task = 1;
    const Dataset dataset = make_demo_dataset(spec, 2);
    std::stringstream buf;
    write_dataset(buf, dataset);
    std::string text = buf.str();

    // Break the third line.
    std::size_t pos = 0;
    for (int i = 0; i < 2; ++i) pos = text.find('\n', pos) + 1;
    text.insert(pos, "{not json");
    std::stringstream broken(text);
    try {
        read_dataset(broken, "demo.jsonl");
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("demo.jsonl:3") != std::string::npos);
    }
}

TEST_CASE("unknown schema version rejected") {
    std::stringstream buf;
    buf << R"({"v":2,"kind":"episode","episode_id":"e","task_id":"t","instruction":"i","target_object":"o","dt_s":0.05})"
        << "\n";
    CHECK_THROWS_AS(read_dataset(buf, "<buf>"), FormatError);
}

TEST_CASE("trajectory round-trip") {
    StateTrajectory traj;
    traj.dt = 0.02;
    for (int t = 0; t < 8; ++t) {
        EEState s;
        s.position = {0.01 * t, -0.02 * t, 0.5};
        s.gripper = 1.0 - 0.1 * t;
        traj.states.push_back(s);
    }
    std::stringstream buf;
    write_trajectory(buf, traj);
    const StateTrajectory parsed = read_trajectory(buf, "<buf>");
    REQUIRE(parsed.states.size() == traj.states.size());
    CHECK(parsed.dt == traj.dt);
    for (std::size_t t = 0; t < traj.states.size(); ++t) CHECK(parsed.states[t] == traj.states[t]);
}

TEST_CASE("experiment config: parse, defaults and field-path errors") {
    const std::string text = R"({
        "scenario": {"box_min_m": [0.19,0.19,0.19], "box_max_m": [0.26,0.26,0.26],
                     "success_radius_m": 0.05},
        "planner": {"chunk_size": 16, "step_cap_m": 0.01, "horizon_steps": 200},
        "attack": {"enabled": true, "profile": "smootherstep_quintic",
                   "total_deviation_m": 0.3, "direction": [0,1,0],
                   "t_window_steps": 20, "activation_distance_m": 0.15},
        "n_episodes": 10,
        "master_seed": 7
    })";
    const ExperimentConfig cfg = parse_experiment_config(text);
    CHECK(cfg.planner.chunk_size == 16);
    CHECK(cfg.n_episodes == 10);
    CHECK(cfg.attack.build().profile.alpha == doctest::Approx(0.03));

    CHECK_THROWS_AS(parse_experiment_config("{nope"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"n_episodes": 0})"), ConfigError);
    CHECK_THROWS_AS(
        parse_experiment_config(R"({"attack": {"profile": "triangular"}})"), ConfigError);
    CHECK_THROWS_AS(
        parse_experiment_config(
            R"({"attack": {"total_deviation_m": 0.3, "alpha_m_per_step": 0.01}})"),
        ConfigError);
}

TEST_CASE("activation distance accepts \"full\"") {
    const ExperimentConfig cfg = parse_experiment_config(
        R"({"attack": {"activation_distance_m": "full"}, "sweep": {"activation_distance_m": [0.05, "full"]}})");
    CHECK(std::isinf(cfg.attack.activation_distance_m));
    REQUIRE(cfg.sweep.activation_distance_m.size() == 2);
    CHECK(cfg.sweep.activation_distance_m[0] == doctest::Approx(0.05));
    CHECK(std::isinf(cfg.sweep.activation_distance_m[1]));
}

TEST_CASE("config hash is stable under key reordering") {
    const ExperimentConfig a = parse_experiment_config(
        R"({"n_episodes": 5, "master_seed": 9, "planner": {"chunk_size": 8, "horizon_steps": 100}})");
    const ExperimentConfig b = parse_experiment_config(
        R"({"planner": {"horizon_steps": 100, "chunk_size": 8}, "master_seed": 9, "n_episodes": 5})");
    CHECK(config_hash(a) == config_hash(b));

    const ExperimentConfig c = parse_experiment_config(
        R"({"n_episodes": 6, "master_seed": 9, "planner": {"chunk_size": 8, "horizon_steps": 100}})");
    CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("seed derivation is the documented splitmix64 chain") {
    // Frozen regression values for the documented definition.
    CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
    CHECK(derive_seed(1, 2, 3) == mix_seed(mix_seed(1, 2), 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
    CHECK(fnv1a64("") == 0xCBF29CE484222325ULL);
}

TEST_CASE("format_double emits round-trip decimals") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "null");
}

TEST_CASE("run_simulate: disabled attack reports a null ASR") {
    ExperimentConfig cfg = parse_experiment_config(
        R"({"n_episodes": 5, "master_seed": 3, "attack": {"enabled": false}})");
    const SweepOutputs out = run_simulate(cfg);
    REQUIRE(out.files.size() == 2);
    const std::string& csv = out.files[1].second;
    CHECK(out.files[1].first == "metrics.csv");
    CHECK(csv.find(",null,") != std::string::npos);  // sr_trigger and asr columns
    CHECK(csv.find("default,1,") != std::string::npos);  // ctsr still reported
}

TEST_CASE("run_sweep: single-point axis yields a one-row table") {
    ExperimentConfig cfg = parse_experiment_config(
        R"({"n_episodes": 5, "master_seed": 3, "sweep": {"chunk_size": [16]}})");
    const SweepOutputs out = run_sweep(cfg);
    REQUIRE(out.files.size() == 1);
    const std::string& csv = out.files[0].second;
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);  // header + one row
}

TEST_CASE("audit_trajectory consumes serialized trajectories") {
    std::vector<DeltaAction> actions(20);
    for (std::size_t i = 0; i < actions.size(); ++i) actions[i].dpos = {1e-4, 0, 0};
    const StateTrajectory traj = rollout(EEState{}, actions, 0.05);
    std::stringstream buf;
    write_trajectory(buf, traj);
    const StateTrajectory parsed = read_trajectory(buf, "<buf>");
    KinematicLimits limits{1.0, 10.0, 100.0, 0.05, 0.5};
    const AuditResult result = audit_trajectory(parsed, "traj", limits);
    CHECK(result.episodes == 1);
    CHECK(result.violations == 0);
}

TEST_CASE("limits JSON round-trip") {
    KinematicLimits limits{0.123, 4.5, 67.8, 0.05, 0.04};
    const std::string json = limits_to_json(limits);
    // Write to a temp file and read back.
    const std::string path = "limits_roundtrip_test.json";
    {
        std::ofstream out(path);
        out << json;
    }
    const KinematicLimits parsed = limits_from_json_file(path);
    CHECK(parsed.v_max == limits.v_max);
    CHECK(parsed.a_max == limits.a_max);
    CHECK(parsed.j_max == limits.j_max);
    CHECK(parsed.dt == limits.dt);
    CHECK(parsed.c2_tol == limits.c2_tol);
    std::remove(path.c_str());
}
