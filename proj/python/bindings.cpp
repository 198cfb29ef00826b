#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "driftlab/demos.hpp"
#include "driftlab/errors.hpp"
#include "driftlab/experiment.hpp"
#include "driftlab/guard.hpp"
#include "driftlab/io.hpp"
#include "driftlab/kinematics.hpp"
#include "driftlab/perturb.hpp"
#include "driftlab/poison.hpp"
#include "driftlab/simenv.hpp"

namespace py = pybind11;
using namespace driftlab;

namespace {

Vec3 vec3_from_seq(const std::vector<double>& v) {
    if (v.size() != 3) throw py::value_error("expected a 3-element sequence");
    return {v[0], v[1], v[2]};
}

}  // namespace

PYBIND11_MODULE(_driftlab, m) {
    m.doc() = "drift-accumulation attack simulator for action-chunked delta-pose policies";
    m.attr("__version__") = "0.1.0";

    py::register_exception<InvalidState>(m, "InvalidStateError");
    py::register_exception<InvalidPair>(m, "InvalidPairError");
    py::register_exception<DomainError>(m, "DomainError");
    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<Unsupported>(m, "UnsupportedError");
    py::register_exception<GroundingError>(m, "GroundingError");
    py::register_exception<NoKeyframe>(m, "NoKeyframeError");
    py::register_exception<FormatError>(m, "FormatError");

    py::class_<Vec3>(m, "Vec3")
        .def(py::init<>())
        .def(py::init<double, double, double>())
        .def_readwrite("x", &Vec3::x)
        .def_readwrite("y", &Vec3::y)
        .def_readwrite("z", &Vec3::z)
        .def("norm", &Vec3::norm)
        .def("__repr__", [](const Vec3& v) {
            return "Vec3(" + std::to_string(v.x) + ", " + std::to_string(v.y) + ", " +
                   std::to_string(v.z) + ")";
        });

    py::class_<EEState>(m, "EEState")
        .def(py::init<>())
        .def_readwrite("position", &EEState::position)
        .def_readwrite("orientation", &EEState::orientation)
        .def_readwrite("gripper", &EEState::gripper)
        .def("to_list", [](const EEState& s) {
            const Vec7 v = s.to_vec7();
            return std::vector<double>(v.begin(), v.end());
        });

    py::class_<DeltaAction>(m, "DeltaAction")
        .def(py::init<>())
        .def_readwrite("dpos", &DeltaAction::dpos)
        .def_readwrite("dori", &DeltaAction::dori)
        .def_readwrite("dgrip", &DeltaAction::dgrip);

    py::class_<StateTrajectory>(m, "StateTrajectory")
        .def_readonly("states", &StateTrajectory::states)
        .def_readonly("dt", &StateTrajectory::dt)
        .def("__len__", [](const StateTrajectory& t) { return t.states.size(); });

    m.def("step", [](const EEState& s, const DeltaAction& a) { return step(s, a); });
    m.def(
        "rollout",
        [](const EEState& init, const std::vector<DeltaAction>& actions, double dt) {
            return rollout(init, actions, dt);
        },
        py::arg("initial"), py::arg("actions"), py::arg("dt") = 0.05);
    m.def("accumulated_drift",
          [](const std::vector<DeltaAction>& clean, const std::vector<DeltaAction>& poisoned) {
              const Vec7 d = accumulated_drift(clean, poisoned);
              return std::vector<double>(d.begin(), d.end());
          });

    m.def("smootherstep", &smootherstep);
    m.def("smootherstep_d1", &smootherstep_d1);
    m.def("smootherstep_d2", &smootherstep_d2);
    m.def("clamped_smootherstep", &clamped_smootherstep);
    m.def("smoothstep_cubic", &smoothstep_cubic);

    py::class_<AttackWindow>(m, "AttackWindow")
        .def(py::init<std::int64_t, int>(), py::arg("t_start") = 0, py::arg("t_window") = 1)
        .def_readwrite("t_start", &AttackWindow::t_start)
        .def_readwrite("t_window", &AttackWindow::t_window);

    py::class_<PerturbationProfile>(m, "PerturbationProfile")
        .def_static(
            "make",
            [](const std::string& kind, double alpha, const std::vector<double>& direction,
               double noise_sigma) {
                return PerturbationProfile::make(profile_kind_from_string(kind), alpha,
                                                 vec3_from_seq(direction), noise_sigma);
            },
            py::arg("kind"), py::arg("alpha"), py::arg("direction"), py::arg("noise_sigma") = 0.0)
        .def_static(
            "from_total_deviation",
            [](const std::string& kind, double total, const std::vector<double>& direction,
               int t_window) {
                return PerturbationProfile::from_total_deviation(profile_kind_from_string(kind),
                                                                 total, vec3_from_seq(direction),
                                                                 t_window);
            },
            py::arg("kind"), py::arg("total_deviation_m"), py::arg("direction"),
            py::arg("t_window"))
        .def_readonly("alpha", &PerturbationProfile::alpha)
        .def_readonly("direction", &PerturbationProfile::direction);

    m.def("perturbation_at", &perturbation_at, py::arg("profile"), py::arg("window"), py::arg("t"),
          py::arg("rng_seed") = 0);
    m.def("expected_window_drift", &expected_window_drift);

    py::class_<Scene>(m, "Scene")
        .def(py::init<>())
        .def_readwrite("object_positions", &Scene::object_positions)
        .def_readwrite("target_object", &Scene::target_object)
        .def_readwrite("ee_init", &Scene::ee_init)
        .def_readwrite("success_radius", &Scene::success_radius);

    py::class_<SceneSpec>(m, "SceneSpec")
        .def(py::init<>())
        .def_readwrite("box_min", &SceneSpec::box_min)
        .def_readwrite("box_max", &SceneSpec::box_max)
        .def_readwrite("success_radius", &SceneSpec::success_radius);

    m.def("sample_scene", &sample_scene);

    py::class_<PlannerConfig>(m, "PlannerConfig")
        .def(py::init<>())
        .def_readwrite("chunk_size", &PlannerConfig::chunk_size)
        .def_readwrite("step_cap", &PlannerConfig::step_cap)
        .def_readwrite("horizon", &PlannerConfig::horizon);

    py::class_<DeploymentAttack>(m, "DeploymentAttack")
        .def(py::init<>())
        .def_readwrite("enabled", &DeploymentAttack::enabled)
        .def_readwrite("activation_distance", &DeploymentAttack::activation_distance)
        .def_readwrite("keyframe_radius", &DeploymentAttack::keyframe_radius)
        .def_readwrite("profile", &DeploymentAttack::profile)
        .def_readwrite("t_window", &DeploymentAttack::t_window);

    py::class_<DefensePolicy>(m, "DefensePolicy")
        .def(py::init<>())
        .def_readwrite("critical_radius", &DefensePolicy::critical_radius)
        .def_readwrite("truncated_k", &DefensePolicy::truncated_k);

    py::class_<EpisodeOutcome>(m, "EpisodeOutcome")
        .def_readonly("success", &EpisodeOutcome::success)
        .def_readonly("final_distance", &EpisodeOutcome::final_distance)
        .def_readonly("chunks_executed", &EpisodeOutcome::chunks_executed)
        .def_readonly("grasped", &EpisodeOutcome::grasped)
        .def_readonly("attack_fired_at", &EpisodeOutcome::attack_fired_at)
        .def_readonly("trajectory", &EpisodeOutcome::trajectory);

    py::class_<MetricsReport>(m, "MetricsReport")
        .def_readonly("ctsr", &MetricsReport::ctsr)
        .def_readonly("sr_trigger", &MetricsReport::sr_trigger)
        .def_readonly("asr", &MetricsReport::asr)
        .def_readonly("n_clean", &MetricsReport::n_clean)
        .def_readonly("n_triggered", &MetricsReport::n_triggered);

    m.def(
        "rollout_episode",
        [](const Scene& scene, const PlannerConfig& cfg, const DeploymentAttack& attack,
           std::optional<DefensePolicy> defense, std::uint64_t seed) {
            return rollout_episode(scene, cfg, attack, defense, seed);
        },
        py::arg("scene"), py::arg("planner"), py::arg("attack"),
        py::arg("defense") = std::nullopt, py::arg("seed") = 0);
    m.def("evaluate_success", &evaluate_success);
    m.def("compute_metrics",
          [](const std::vector<EpisodeOutcome>& clean, const std::vector<EpisodeOutcome>& trig) {
              return compute_metrics(clean, trig);
          });

    py::class_<KinematicLimits>(m, "KinematicLimits")
        .def(py::init<>())
        .def_readwrite("v_max", &KinematicLimits::v_max)
        .def_readwrite("a_max", &KinematicLimits::a_max)
        .def_readwrite("j_max", &KinematicLimits::j_max)
        .def_readwrite("dt", &KinematicLimits::dt)
        .def_readwrite("c2_tol", &KinematicLimits::c2_tol);

    py::class_<DetectionVerdict>(m, "DetectionVerdict")
        .def_readonly("velocity_ok", &DetectionVerdict::velocity_ok)
        .def_readonly("acceleration_ok", &DetectionVerdict::acceleration_ok)
        .def_readonly("jerk_ok", &DetectionVerdict::jerk_ok)
        .def_readonly("c2_ok", &DetectionVerdict::c2_ok)
        .def("all_ok", &DetectionVerdict::all_ok);

    m.def("validate_kinematics",
          [](const StateTrajectory& traj, const KinematicLimits& limits) {
              return validate_kinematics(traj, limits);
          });
    m.def("calibrate_limits",
          [](const std::vector<StateTrajectory>& trajs, double percentile, double safety) {
              return calibrate_limits(trajs, percentile, safety);
          },
          py::arg("clean_trajectories"), py::arg("percentile") = 0.999, py::arg("safety") = 1.5);

    py::class_<TeAttenuationResult>(m, "TeAttenuationResult")
        .def_readonly("smooth_retention_ratio", &TeAttenuationResult::smooth_retention_ratio)
        .def_readonly("noise_variance_ratio", &TeAttenuationResult::noise_variance_ratio);

    py::class_<EnsembleWeights>(m, "EnsembleWeights")
        .def_static("uniform", &EnsembleWeights::uniform)
        .def_static("exponential", &EnsembleWeights::exponential)
        .def_readonly("weights", &EnsembleWeights::weights)
        .def("sum_sq", &EnsembleWeights::sum_sq);

    m.def("te_attenuation_experiment", &te_attenuation_experiment, py::arg("k"),
          py::arg("weights"), py::arg("t_window"), py::arg("sigma"), py::arg("n_trials"),
          py::arg("seed") = 0);

    // Dataset-level operations work on files; python callers drive the same
    // JSONL formats as the CLI.
    m.def("generate_demo_dataset", [](const std::string& path, int tasks, int episodes_per_task,
                                      std::uint64_t seed) {
        DemoSpec spec;
        spec.n_tasks = tasks;
        spec.episodes_per_task = episodes_per_task;
        write_dataset_file(path, make_demo_dataset(spec, seed));
    });
    m.def("poison_dataset_file",
          [](const std::string& in_path, const std::string& out_path, int episodes_per_task,
             std::uint64_t seed) {
              auto [poisoned, report] =
                  poison_dataset(read_dataset_file(in_path), AttackConfig{}, episodes_per_task, seed);
              write_dataset_file(out_path, poisoned);
              return poison_report_to_json(report);
          });
}
