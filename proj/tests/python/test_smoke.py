"""Smoke tests for the python bindings."""

import math
import os
import sys
import tempfile

try:
    import driftlab as dl
except ImportError:
    import _driftlab as dl


def test_smootherstep():
    assert dl.smootherstep(0.0) == 0.0
    assert dl.smootherstep(1.0) == 1.0
    assert dl.smootherstep(0.25) == 0.103515625
    assert dl.smootherstep_d1(0.5) == 1.875
    try:
        dl.smootherstep(1.5)
    except dl.DomainError:
        pass
    else:
        raise AssertionError("expected DomainError")
    assert dl.clamped_smootherstep(1.5) == 1.0


def test_rollout_and_drift():
    a = dl.DeltaAction()
    a.dpos = dl.Vec3(0.001, 0.0, 0.0)
    traj = dl.rollout(dl.EEState(), [a] * 50, 0.05)
    assert len(traj) == 51
    assert abs(traj.states[-1].position.x - 0.05) <= 1e-15

    clean = [dl.DeltaAction() for _ in range(50)]
    drift = dl.accumulated_drift(clean, [a] * 50)
    assert abs(drift[0] - 0.05) <= 1e-15


def test_episode_and_metrics():
    scene = dl.sample_scene(dl.SceneSpec(), 7)
    planner = dl.PlannerConfig()

    off = dl.DeploymentAttack()
    clean = dl.rollout_episode(scene, planner, off, None, 7)
    assert clean.success and clean.grasped

    attack = dl.DeploymentAttack()
    attack.enabled = True
    attack.profile = dl.PerturbationProfile.from_total_deviation(
        "smootherstep_quintic", 0.3, [0.0, 1.0, 0.0], 20
    )
    attack.t_window = 20
    triggered = dl.rollout_episode(scene, planner, attack, None, 7)
    assert not triggered.success
    assert triggered.attack_fired_at is not None

    defended = dl.rollout_episode(scene, planner, attack, dl.DefensePolicy(), 7)
    assert defended.success

    metrics = dl.compute_metrics([clean], [triggered])
    assert metrics.ctsr == 1.0
    assert metrics.asr == 1.0


def test_te_experiment():
    result = dl.te_attenuation_experiment(
        4, dl.EnsembleWeights.uniform(4), 40, 1.0, 2000, 3
    )
    assert result.smooth_retention_ratio >= 0.99
    assert abs(result.noise_variance_ratio - 0.25) < 0.05


def test_dataset_files():
    with tempfile.TemporaryDirectory() as tmp:
        clean = os.path.join(tmp, "clean.jsonl")
        poisoned = os.path.join(tmp, "poisoned.jsonl")
        dl.generate_demo_dataset(clean, 3, 2, 11)
        report = dl.poison_dataset_file(clean, poisoned, 1, 5)
        assert "poisoned_frame_fraction" in report
        assert os.path.getsize(poisoned) > os.path.getsize(clean) * 0.9


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"ok {test.__name__}")
    print(f"{len(tests)} python smoke tests passed (driftlab {dl.__version__})")


if __name__ == "__main__":
    sys.exit(main())
