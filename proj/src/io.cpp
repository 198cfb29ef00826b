#include "driftlab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "driftlab/errors.hpp"
#include "driftlab/seeds.hpp"

namespace driftlab {

using nlohmann::json;

namespace {

json vec3_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec3_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw ConfigError("expected a 3-element array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec7_to_json(const Vec7& v) { return json(v); }

Vec7 vec7_from_json(const json& j) {
    if (!j.is_array() || j.size() != 7) throw ConfigError("expected a 7-element array");
    Vec7 v{};
    for (std::size_t i = 0; i < 7; ++i) v[i] = j[i].get<double>();
    return v;
}

void check_version(const json& j) {
    if (!j.contains("v")) throw ConfigError("record missing schema version field 'v'");
    const int v = j.at("v").get<int>();
    if (v != kSchemaVersion)
        throw ConfigError("unsupported schema version " + std::to_string(v));
}

json trigger_to_json(const std::optional<TriggerDescriptor>& t) {
    if (!t) return nullptr;
    return json{{"shape", "circle"},
                {"radius_px", t->radius_px},
                {"alpha", t->alpha},
                {"color", to_string(t->color)}};
}

std::optional<TriggerDescriptor> trigger_from_json(const json& j) {
    if (j.is_null()) return std::nullopt;
    TriggerDescriptor t;
    if (j.at("shape").get<std::string>() != "circle")
        throw ConfigError("unknown trigger shape");
    t.radius_px = j.at("radius_px").get<int>();
    t.alpha = j.at("alpha").get<double>();
    t.color = trigger_color_from_string(j.at("color").get<std::string>());
    if (t.radius_px < 1) throw ConfigError("trigger: radius_px must be >= 1");
    if (!(t.alpha > 0.0 && t.alpha <= 1.0)) throw ConfigError("trigger: alpha must be in (0,1]");
    return t;
}

json frame_to_json(const Frame& f, std::size_t t) {
    json objects = json::object();
    for (const auto& [id, pos] : f.obs.object_positions) objects[id] = vec3_to_json(pos);
    return json{{"v", kSchemaVersion},
                {"t", t},
                {"ee",
                 {{"pos", vec3_to_json(f.obs.ee_state.position)},
                  {"ori", vec3_to_json(f.obs.ee_state.orientation)},
                  {"grip", f.obs.ee_state.gripper}}},
                {"objects", objects},
                {"trigger", trigger_to_json(f.obs.trigger)},
                {"action", vec7_to_json(f.action.to_vec7())}};
}

Frame frame_from_json(const json& j) {
    check_version(j);
    Frame f;
    const json& ee = j.at("ee");
    f.obs.ee_state.position = vec3_from_json(ee.at("pos"));
    f.obs.ee_state.orientation = vec3_from_json(ee.at("ori"));
    f.obs.ee_state.gripper = ee.at("grip").get<double>();
    for (const auto& [id, pos] : j.at("objects").items())
        f.obs.object_positions[id] = vec3_from_json(pos);
    f.obs.trigger = trigger_from_json(j.at("trigger"));
    f.action = DeltaAction::from_vec7(vec7_from_json(j.at("action")));
    return f;
}

}  // namespace

void write_dataset(std::ostream& out, const Dataset& dataset) {
    for (const Demonstration& demo : dataset) {
        const json header{{"v", kSchemaVersion},           {"kind", "episode"},
                          {"episode_id", demo.episode_id}, {"task_id", demo.task_id},
                          {"instruction", demo.instruction}, {"target_object", demo.target_object},
                          {"dt_s", demo.dt}};
        out << header.dump() << '\n';
        for (std::size_t t = 0; t < demo.frames.size(); ++t)
            out << frame_to_json(demo.frames[t], t).dump() << '\n';
    }
}

void write_dataset_file(const std::string& path, const Dataset& dataset) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open for writing: " + path);
    write_dataset(out, dataset);
}

Dataset read_dataset(std::istream& in, const std::string& origin) {
    Dataset dataset;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw FormatError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
        try {
            if (j.contains("kind") && j.at("kind") == "episode") {
                check_version(j);
                Demonstration demo;
                demo.episode_id = j.at("episode_id").get<std::string>();
                demo.task_id = j.at("task_id").get<std::string>();
                demo.instruction = j.at("instruction").get<std::string>();
                demo.target_object = j.at("target_object").get<std::string>();
                demo.dt = j.value("dt_s", 0.05);
                dataset.push_back(std::move(demo));
            } else {
                if (dataset.empty())
                    throw ConfigError("frame record before any episode header");
                dataset.back().frames.push_back(frame_from_json(j));
            }
        } catch (const json::exception& e) {
            throw FormatError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const ConfigError& e) {
            throw FormatError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return dataset;
}

Dataset read_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open: " + path);
    return read_dataset(in, path);
}

void write_trajectory(std::ostream& out, const StateTrajectory& traj) {
    const json header{{"v", kSchemaVersion},
                      {"kind", "trajectory"},
                      {"dt_s", traj.dt},
                      {"n_states", traj.states.size()}};
    out << header.dump() << '\n';
    for (std::size_t t = 0; t < traj.states.size(); ++t) {
        const EEState& s = traj.states[t];
        const json row{{"v", kSchemaVersion},
                       {"t", t},
                       {"ee",
                        {{"pos", vec3_to_json(s.position)},
                         {"ori", vec3_to_json(s.orientation)},
                         {"grip", s.gripper}}}};
        out << row.dump() << '\n';
    }
}

StateTrajectory read_trajectory(std::istream& in, const std::string& origin) {
    StateTrajectory traj;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw FormatError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
        try {
            check_version(j);
            if (j.contains("kind")) {
                if (j.at("kind") != "trajectory")
                    throw ConfigError("not a trajectory header");
                traj.dt = j.at("dt_s").get<double>();
                have_header = true;
            } else {
                if (!have_header) throw ConfigError("state record before the trajectory header");
                EEState s;
                const json& ee = j.at("ee");
                s.position = vec3_from_json(ee.at("pos"));
                s.orientation = vec3_from_json(ee.at("ori"));
                s.gripper = ee.at("grip").get<double>();
                traj.states.push_back(s);
            }
        } catch (const json::exception& e) {
            throw FormatError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const ConfigError& e) {
            throw FormatError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return traj;
}

std::string poison_report_to_json(const PoisonReport& report) {
    json episodes = json::array();
    for (const auto& e : report.episodes)
        episodes.push_back(
            {{"episode_id", e.episode_id}, {"t_start", e.t_start}, {"t_end", e.t_end}});
    auto stats = [](const ActionStats& s) {
        return json{{"mean", s.mean}, {"stddev", s.stddev}, {"max", s.max}, {"n", s.n}};
    };
    const json j{{"v", kSchemaVersion},
                 {"episodes", episodes},
                 {"poisoned_frame_fraction", report.poisoned_frame_fraction},
                 {"clean_action_stats", stats(report.clean_stats)},
                 {"poisoned_action_stats", stats(report.poisoned_stats)},
                 {"warnings", report.warnings}};
    return j.dump(2);
}

std::string verdict_to_json(const std::string& episode_id, const DetectionVerdict& verdict) {
    json j{{"v", kSchemaVersion},
           {"episode_id", episode_id},
           {"velocity_ok", verdict.velocity_ok},
           {"acceleration_ok", verdict.acceleration_ok},
           {"jerk_ok", verdict.jerk_ok},
           {"c2_ok", verdict.c2_ok},
           {"scheme", to_string(verdict.scheme)}};
    if (verdict.worst_violation) {
        const Violation& w = *verdict.worst_violation;
        j["worst_violation"] = {{"quantity", to_string(w.quantity)},
                                {"timestep", w.timestep},
                                {"magnitude", w.magnitude},
                                {"limit", w.limit}};
    } else {
        j["worst_violation"] = nullptr;
    }
    if (!verdict.note.empty()) j["note"] = verdict.note;
    return j.dump();
}

KinematicLimits limits_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
    KinematicLimits limits;
    try {
        limits.v_max = j.at("v_max_mps").get<double>();
        limits.a_max = j.at("a_max_mps2").get<double>();
        limits.j_max = j.at("j_max_mps3").get<double>();
        limits.dt = j.at("dt_s").get<double>();
        limits.c2_tol = j.value("c2_tol", 0.05);
    } catch (const json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
    return limits;
}

std::string limits_to_json(const KinematicLimits& limits) {
    const json j{{"v", kSchemaVersion},
                 {"v_max_mps", limits.v_max},
                 {"a_max_mps2", limits.a_max},
                 {"j_max_mps3", limits.j_max},
                 {"dt_s", limits.dt},
                 {"c2_tol", limits.c2_tol}};
    return j.dump(2);
}

std::string format_double(double value) {
    if (std::isnan(value)) return "null";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------

DeploymentAttack AttackSetup::build() const {
    DeploymentAttack attack;
    attack.enabled = enabled;
    attack.activation_distance = activation_distance_m;
    attack.keyframe_radius = keyframe_radius_m;
    attack.t_window = t_window_steps;
    attack.mode = mode;
    if (total_deviation_m.has_value() == alpha_m_per_step.has_value())
        throw ConfigError(
            "attack: set exactly one of total_deviation_m / alpha_m_per_step");
    if (profile_kind == ProfileKind::gaussian_noise) {
        attack.profile =
            PerturbationProfile::make(profile_kind, 0.0, direction, noise_sigma);
    } else if (total_deviation_m) {
        attack.profile = PerturbationProfile::from_total_deviation(profile_kind, *total_deviation_m,
                                                                   direction, t_window_steps);
    } else {
        attack.profile = PerturbationProfile::make(profile_kind, *alpha_m_per_step, direction);
    }
    return attack;
}

namespace {

double activation_from_json(const json& j, const std::string& path) {
    if (j.is_string()) {
        if (j.get<std::string>() == "full") return std::numeric_limits<double>::infinity();
        throw ConfigError("config: " + path + " must be a number or \"full\"");
    }
    return j.get<double>();
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    ExperimentConfig cfg;
    try {
        if (j.contains("scenario")) {
            const json& s = j["scenario"];
            if (s.contains("box_min_m")) cfg.scenario.box_min = vec3_from_json(s["box_min_m"]);
            if (s.contains("box_max_m")) cfg.scenario.box_max = vec3_from_json(s["box_max_m"]);
            if (s.contains("success_radius_m"))
                cfg.scenario.success_radius = s["success_radius_m"].get<double>();
            if (s.contains("target_object"))
                cfg.scenario.target_object = s["target_object"].get<std::string>();
        }
        if (j.contains("planner")) {
            const json& p = j["planner"];
            if (p.contains("chunk_size")) cfg.planner.chunk_size = p["chunk_size"].get<int>();
            if (p.contains("step_cap_m")) cfg.planner.step_cap = p["step_cap_m"].get<double>();
            if (p.contains("horizon_steps")) cfg.planner.horizon = p["horizon_steps"].get<int>();
            if (p.contains("dt_s")) cfg.planner.dt = p["dt_s"].get<double>();
        }
        if (j.contains("attack")) {
            const json& a = j["attack"];
            AttackSetup& atk = cfg.attack;
            if (a.contains("enabled")) atk.enabled = a["enabled"].get<bool>();
            if (a.contains("profile"))
                atk.profile_kind = profile_kind_from_string(a["profile"].get<std::string>());
            atk.total_deviation_m.reset();
            atk.alpha_m_per_step.reset();
            if (a.contains("total_deviation_m"))
                atk.total_deviation_m = a["total_deviation_m"].get<double>();
            if (a.contains("alpha_m_per_step"))
                atk.alpha_m_per_step = a["alpha_m_per_step"].get<double>();
            if (!atk.total_deviation_m && !atk.alpha_m_per_step) atk.total_deviation_m = 0.3;
            if (a.contains("direction")) atk.direction = vec3_from_json(a["direction"]);
            if (a.contains("t_window_steps")) atk.t_window_steps = a["t_window_steps"].get<int>();
            if (a.contains("activation_distance_m"))
                atk.activation_distance_m =
                    activation_from_json(a["activation_distance_m"], "attack.activation_distance_m");
            if (a.contains("keyframe_radius_m"))
                atk.keyframe_radius_m = a["keyframe_radius_m"].get<double>();
            if (a.contains("trigger_mode"))
                atk.mode = trigger_mode_from_string(a["trigger_mode"].get<std::string>());
            if (a.contains("noise_sigma")) atk.noise_sigma = a["noise_sigma"].get<double>();
        }
        if (j.contains("defense")) {
            const json& d = j["defense"];
            const bool enabled = d.value("enabled", true);
            if (enabled) {
                DefensePolicy policy;
                if (d.contains("critical_radius_m"))
                    policy.critical_radius = d["critical_radius_m"].get<double>();
                if (d.contains("truncated_chunk_size"))
                    policy.truncated_k = d["truncated_chunk_size"].get<int>();
                if (policy.truncated_k > cfg.planner.chunk_size)
                    throw ConfigError(
                        "config: defense.truncated_chunk_size exceeds planner.chunk_size");
                cfg.defense = policy;
            }
        }
        if (j.contains("sweep")) {
            const json& s = j["sweep"];
            if (s.contains("chunk_size"))
                cfg.sweep.chunk_size = s["chunk_size"].get<std::vector<int>>();
            if (s.contains("activation_distance_m"))
                for (const auto& v : s["activation_distance_m"])
                    cfg.sweep.activation_distance_m.push_back(
                        activation_from_json(v, "sweep.activation_distance_m"));
            if (s.contains("profile"))
                for (const auto& v : s["profile"])
                    cfg.sweep.profile.push_back(profile_kind_from_string(v.get<std::string>()));
        }
        if (j.contains("n_episodes")) cfg.n_episodes = j["n_episodes"].get<int>();
        if (j.contains("master_seed")) cfg.master_seed = j["master_seed"].get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    if (cfg.n_episodes < 1) throw ConfigError("config: n_episodes must be >= 1");
    if (cfg.planner.chunk_size < 1) throw ConfigError("config: planner.chunk_size must be >= 1");
    if (cfg.planner.horizon < cfg.planner.chunk_size)
        throw ConfigError("config: planner.horizon_steps must be >= planner.chunk_size");
    cfg.attack.build();  // validate attack fields eagerly
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_experiment_config(ss.str());
}

std::string canonical_config_json(const ExperimentConfig& cfg) {
    auto act = [](double v) -> json {
        if (std::isinf(v)) return "full";
        return v;
    };
    json sweep_act = json::array();
    for (double v : cfg.sweep.activation_distance_m) sweep_act.push_back(act(v));
    json sweep_prof = json::array();
    for (ProfileKind k : cfg.sweep.profile) sweep_prof.push_back(to_string(k));

    json a{{"enabled", cfg.attack.enabled},
           {"profile", to_string(cfg.attack.profile_kind)},
           {"direction", vec3_to_json(cfg.attack.direction)},
           {"t_window_steps", cfg.attack.t_window_steps},
           {"activation_distance_m", act(cfg.attack.activation_distance_m)},
           {"keyframe_radius_m", cfg.attack.keyframe_radius_m},
           {"trigger_mode", to_string(cfg.attack.mode)},
           {"noise_sigma", cfg.attack.noise_sigma}};
    if (cfg.attack.total_deviation_m) a["total_deviation_m"] = *cfg.attack.total_deviation_m;
    if (cfg.attack.alpha_m_per_step) a["alpha_m_per_step"] = *cfg.attack.alpha_m_per_step;

    json j{{"v", kSchemaVersion},
           {"scenario",
            {{"box_min_m", vec3_to_json(cfg.scenario.box_min)},
             {"box_max_m", vec3_to_json(cfg.scenario.box_max)},
             {"success_radius_m", cfg.scenario.success_radius},
             {"target_object", cfg.scenario.target_object}}},
           {"planner",
            {{"chunk_size", cfg.planner.chunk_size},
             {"step_cap_m", cfg.planner.step_cap},
             {"horizon_steps", cfg.planner.horizon},
             {"dt_s", cfg.planner.dt}}},
           {"attack", a},
           {"sweep",
            {{"chunk_size", cfg.sweep.chunk_size},
             {"activation_distance_m", sweep_act},
             {"profile", sweep_prof}}},
           {"n_episodes", cfg.n_episodes},
           {"master_seed", cfg.master_seed}};
    if (cfg.defense)
        j["defense"] = {{"enabled", true},
                        {"critical_radius_m", cfg.defense->critical_radius},
                        {"truncated_chunk_size", cfg.defense->truncated_k}};
    // nlohmann::json objects keep keys sorted, so dump() is canonical.
    return j.dump();
}

std::uint64_t config_hash(const ExperimentConfig& config) {
    return fnv1a64(canonical_config_json(config));
}

AttackConfig parse_attack_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("attack config: ") + e.what());
    }
    AttackConfig cfg;
    try {
        if (j.contains("profile"))
            cfg.profile_kind = profile_kind_from_string(j["profile"].get<std::string>());
        if (j.contains("direction")) cfg.direction = vec3_from_json(j["direction"]);
        if (j.contains("t_window_steps")) cfg.t_window = j["t_window_steps"].get<int>();
        if (j.contains("activation_distance_m"))
            cfg.d_th = j["activation_distance_m"].get<double>();
        const bool has_total = j.contains("total_deviation_m");
        const bool has_alpha = j.contains("alpha_m_per_step");
        if (has_total && has_alpha)
            throw ConfigError("attack config: set only one of total_deviation_m / alpha_m_per_step");
        if (has_alpha) {
            cfg.alpha = j["alpha_m_per_step"].get<double>();
        } else if (has_total) {
            cfg.alpha = PerturbationProfile::from_total_deviation(
                            cfg.profile_kind, j["total_deviation_m"].get<double>(), cfg.direction,
                            cfg.t_window)
                            .alpha;
        }
        if (j.contains("trigger")) {
            const auto t = trigger_from_json(j["trigger"]);
            if (t) cfg.trigger = *t;
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("attack config: ") + e.what());
    }
    if (!(cfg.d_th > 0.0)) throw ConfigError("attack config: activation_distance_m must be > 0");
    if (cfg.t_window < 1) throw ConfigError("attack config: t_window_steps must be >= 1");
    return cfg;
}

AttackConfig load_attack_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open attack config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_attack_config(ss.str());
}

}  // namespace driftlab
