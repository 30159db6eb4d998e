import math

import numpy as np
import pytest

from armseq import (ArmModel, Box, PlanningTimeoutError, Scene,
                    SeedInvalidError, Trajectory, adapt_trajectory,
                    config_distance, fallback_plan, finite_difference_max_jerk,
                    motion_valid, trajectory_metrics)
from armseq.motion import SOURCE_ADAPTED, SOURCE_FALLBACK


def test_adapt_straight_valid_seed_unchanged(arm2, empty_scene):
    a, b = np.array([0.0, 0.0]), np.array([1.0, -0.5])
    seed = Trajectory([a, b])
    out = adapt_trajectory(seed, arm2, empty_scene)
    assert out.source == SOURCE_ADAPTED
    assert np.array_equal(out.waypoints[0], a)
    assert np.array_equal(out.waypoints[-1], b)
    assert out.length() == pytest.approx(seed.length(), abs=1e-12)
    assert len(out.waypoints) == 2  # interior subdivisions pruned away


def test_adapt_detour_converges_to_straight(arm2, empty_scene):
    a = np.array([0.0, 0.0])
    b = np.array([1.2, 0.4])
    detour = Trajectory([a, np.array([0.4, 1.4]), np.array([0.9, -1.0]), b])
    out = adapt_trajectory(detour, arm2, empty_scene, rng_seed=1)
    assert out.length() == pytest.approx(config_distance(a, b), abs=1e-6)
    assert np.array_equal(out.waypoints[0], a)
    assert np.array_equal(out.waypoints[-1], b)


def test_adapt_never_lengthens_valid_seed(arm2):
    scene = Scene((Box(0.9, 0.9, 1.4, 1.4),))
    rng = np.random.default_rng(8)
    for trial in range(10):
        wps = [rng.uniform(-2.0, 2.0, size=2)]
        for _ in range(3):
            wps.append(np.clip(wps[-1] + rng.uniform(-0.8, 0.8, size=2), -3.1, 3.1))
        seed = Trajectory(wps)
        if not all(motion_valid(arm2, x, y, scene) for x, y in zip(wps, wps[1:])):
            continue
        out = adapt_trajectory(seed, arm2, scene, rng_seed=trial)
        assert out.length() <= seed.length() + 1e-12
        for x, y in zip(out.waypoints, out.waypoints[1:]):
            assert motion_valid(arm2, x, y, scene)


def test_adapt_seed_invalid_when_unrepairable(arm2):
    # the box reaches close enough to the base that a whole band of first-joint
    # angles is blocked; no 0.2 rad perturbation can bridge it
    scene = Scene((Box(0.5, 0.5, 1.8, 1.8),))
    a = np.array([0.0, 0.0])      # tip (2, 0)
    b = np.array([math.pi / 2, 0.0])  # tip (0, 2); sweep passes through the box
    seed = Trajectory([a, b])
    with pytest.raises(SeedInvalidError):
        adapt_trajectory(seed, arm2, scene, rng_seed=0)


def test_adapt_repairs_small_violation(arm2):
    # a small disc sits exactly on the middle waypoint's tip; perturbation clears it
    from armseq import Disc, forward_kinematics

    a = np.array([0.3, 0.9])
    b = np.array([0.9, 0.9])
    mid = np.array([0.6, 0.2])
    tip, _ = forward_kinematics(arm2, mid)
    scene = Scene((Disc((float(tip[0]), float(tip[1])), 0.05),))
    seed = Trajectory([a, mid, b])
    out = adapt_trajectory(seed, arm2, scene, rng_seed=1)
    for x, y in zip(out.waypoints, out.waypoints[1:]):
        assert motion_valid(arm2, x, y, scene)
    assert np.array_equal(out.waypoints[0], a)
    assert np.array_equal(out.waypoints[-1], b)


def test_adapt_deterministic(arm2):
    from armseq import Disc, forward_kinematics

    mid = np.array([0.6, 0.2])
    tip, _ = forward_kinematics(arm2, mid)
    scene = Scene((Disc((float(tip[0]), float(tip[1])), 0.05),))
    seed = Trajectory([np.array([0.3, 0.9]), mid, np.array([0.9, 0.9])])
    out1 = adapt_trajectory(seed, arm2, scene, rng_seed=4)
    out2 = adapt_trajectory(seed, arm2, scene, rng_seed=4)
    assert len(out1.waypoints) == len(out2.waypoints)
    for x, y in zip(out1.waypoints, out2.waypoints):
        assert np.array_equal(x, y)


def test_fallback_identical_endpoints(arm2, empty_scene):
    q = np.array([0.4, -0.8])
    out = fallback_plan(q, q, arm2, empty_scene)
    assert len(out.waypoints) == 1
    assert np.array_equal(out.waypoints[0], q)
    assert out.source == SOURCE_FALLBACK


def test_fallback_empty_scene_cost_bound(arm2, empty_scene):
    rng = np.random.default_rng(100)
    for seed in range(100):
        a, b = rng.uniform(-math.pi, math.pi, size=(2, 2))
        out = fallback_plan(a, b, arm2, empty_scene, rng_seed=seed)
        assert out.length() <= 1.5 * config_distance(a, b) + 1e-12
        assert np.array_equal(out.waypoints[0], a)
        assert np.array_equal(out.waypoints[-1], b)


def test_fallback_detours_around_obstacle(arm2):
    # box outside the first link's reach: the arm can fold past it
    scene = Scene((Box(1.2, 1.2, 1.7, 1.7),))
    a = np.array([0.0, 0.0])
    b = np.array([math.pi / 2, 0.0])
    assert not motion_valid(arm2, a, b, scene)
    out = fallback_plan(a, b, arm2, scene, timeout=5.0, rng_seed=2)
    assert np.array_equal(out.waypoints[0], a)
    assert np.array_equal(out.waypoints[-1], b)
    for x, y in zip(out.waypoints, out.waypoints[1:]):
        assert motion_valid(arm2, x, y, scene)
    assert out.length() > config_distance(a, b)  # genuine detour


def test_fallback_timeout_on_disconnected_component(arm2):
    # two small boxes close to the base wall off a band of first-joint angles
    scene = Scene((Box(0.2, 0.2, 0.5, 0.5), Box(0.2, -0.5, 0.5, -0.2)))
    start = np.array([math.pi, 0.0])
    goal = np.array([0.0, 0.0])
    from armseq import config_valid

    assert config_valid(arm2, start, scene)
    assert config_valid(arm2, goal, scene)
    with pytest.raises(PlanningTimeoutError):
        fallback_plan(start, goal, arm2, scene, timeout=0.4, rng_seed=1)


def test_fallback_deterministic(arm2):
    scene = Scene((Box(1.2, 1.2, 1.7, 1.7),))
    a = np.array([0.0, 0.0])
    b = np.array([math.pi / 2, 0.0])
    o1 = fallback_plan(a, b, arm2, scene, timeout=5.0, rng_seed=7)
    o2 = fallback_plan(a, b, arm2, scene, timeout=5.0, rng_seed=7)
    assert len(o1.waypoints) == len(o2.waypoints)
    for x, y in zip(o1.waypoints, o2.waypoints):
        assert np.array_equal(x, y)


# ----------------------------------------------------------------------- metrics

def test_metrics_constant_trajectory(arm2, empty_scene):
    q = np.array([0.2, 0.2])
    m = trajectory_metrics(Trajectory([q, q.copy(), q.copy()]), arm2, 0.01, empty_scene)
    assert m.config_length == 0.0
    assert m.exec_time == 0.0
    assert m.max_jerk == 0.0
    assert m.valid


def test_metrics_single_segment(arm2, empty_scene):
    a, b = np.array([0.0, 0.0]), np.array([1.0, -2.0])
    m = trajectory_metrics(Trajectory([a, b]), arm2, 0.01, empty_scene)
    assert m.config_length == pytest.approx(2.0)
    # slowest joint runs 2 rad at 1 rad/s
    assert m.exec_time == pytest.approx(2.0)
    # constant-velocity ramp: interior third differences vanish
    assert m.max_jerk == pytest.approx(0.0, abs=1e-6)
    assert m.valid


def test_metrics_quintic_profile_matches_analytic():
    dt = 1e-3
    t = np.arange(0.0, 1.0 + dt / 2, dt)
    samples = t ** 5
    jerk = finite_difference_max_jerk(samples, dt)
    t_interior = t[-3]  # last sample with a full central stencil
    analytic = 60.0 * t_interior ** 2
    assert abs(jerk - analytic) / analytic < 0.005
    assert abs(jerk - 60.0) / 60.0 < 0.005  # the tau -> 1 limit


def test_metrics_quintic_dt_halving_stable():
    vals = []
    for dt in (1e-3, 5e-4):
        t = np.arange(0.0, 1.0 + dt / 2, dt)
        vals.append(finite_difference_max_jerk(t ** 5, dt))
    assert abs(vals[1] - vals[0]) / vals[0] < 0.01


def test_metrics_short_trajectories_zero_jerk():
    assert finite_difference_max_jerk(np.zeros((4, 2)), 0.01) == 0.0
    assert finite_difference_max_jerk(np.zeros((1, 2)), 0.01) == 0.0


def test_metrics_validity_flag(arm2):
    scene = Scene((Box(0.5, 0.5, 1.8, 1.8),))
    a = np.array([0.0, 0.0])
    b = np.array([math.pi / 2, 0.0])
    m = trajectory_metrics(Trajectory([a, b]), arm2, 0.01, scene)
    assert not m.valid


def test_adapt_and_fallback_pass_half_step_recheck(arm2):
    from armseq import Disc, forward_kinematics

    step = 0.05
    mid = np.array([0.6, 0.2])
    tip, _ = forward_kinematics(arm2, mid)
    scene = Scene((Disc((float(tip[0]), float(tip[1])), 0.05),))
    seed = Trajectory([np.array([0.3, 0.9]), mid, np.array([0.9, 0.9])])
    out = adapt_trajectory(seed, arm2, scene, step=step, rng_seed=6)
    for x, y in zip(out.waypoints, out.waypoints[1:]):
        assert motion_valid(arm2, x, y, scene, step / 2)
    fold_scene = Scene((Box(1.2, 1.2, 1.7, 1.7),))
    out = fallback_plan(np.array([0.0, 0.0]), np.array([math.pi / 2, 0.0]), arm2,
                        fold_scene, timeout=5.0, step=step, rng_seed=5)
    for x, y in zip(out.waypoints, out.waypoints[1:]):
        assert motion_valid(arm2, x, y, fold_scene, step / 2)
