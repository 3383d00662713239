"""
Straight-line motion planning, step quantization and synchronization.
"""
import math

import numpy as np
import pytest

from app.core.config import settings
from app.core.exceptions import PathLeavesWorkspace, UnreachableEndpoint
from app.packages.kinematics.service import forward_kinematics_lsq, inverse_kinematics
from app.packages.trajectory.models import StepSchedule
from app.packages.trajectory.service import (
    TrapezoidProfile,
    exact_schedule,
    plan_line_move,
    plan_path,
    profile_duration,
    quantization_bound,
    quantize_length,
    quantize_schedule,
    synchronization_check,
)
from app.packages.workspace.service import ReachabilityChecker, segment_reachable
from app.scene.models import ChainLengths, Pose
from conftest import UNIT_ANCHORS, make_scene

LIMIT_SLACK = 1e-9


def _random_moves(scene, count, seed):
    rng = np.random.default_rng(seed)
    checker = ReachabilityChecker(scene)
    sizes = scene.room.sizes()
    moves = []
    while len(moves) < count:
        a, b = rng.uniform(0.0, 1.0, (2, 3)) * sizes
        if checker.violations(a, first_only=True) or checker.violations(b, first_only=True):
            continue
        start, goal = Pose.of(a), Pose.of(b)
        if not segment_reachable(scene, start, goal, settings.PATH_SAMPLE_SPACING_M).reachable:
            continue
        moves.append((start, goal))
    return moves


def _assert_within_limits(scene, plan):
    times = np.array([s.time for s in plan.samples])
    lengths = np.array([s.lengths.values for s in plan.samples])
    dt = np.diff(times)
    rates = np.diff(lengths, axis=0) / dt[:, None]
    speed = np.array([d.speed_max for d in scene.drives])
    accel = np.array([d.accel_max for d in scene.drives])
    assert np.all(np.abs(rates) <= speed + LIMIT_SLACK)
    # Second differences on the interior uniform stretches of the tick grid
    for k in range(1, len(dt)):
        if abs(dt[k] - dt[k - 1]) < 1e-12:
            second = (rates[k] - rates[k - 1]) / dt[k]
            assert np.all(np.abs(second) <= accel + LIMIT_SLACK)


# ============= Profile =============
def test_trapezoid_duration():
    assert profile_duration(2.0, 0.5, 0.5) == pytest.approx(5.0, abs=1e-9)
    assert not TrapezoidProfile(2.0, 0.5, 0.5).triangular


def test_triangular_duration():
    assert profile_duration(0.2, 0.5, 0.5) == pytest.approx(2 * math.sqrt(0.4), abs=1e-9)
    assert profile_duration(0.2, 0.5, 0.5) == pytest.approx(1.264911, abs=1e-6)
    assert TrapezoidProfile(0.2, 0.5, 0.5).triangular
    assert type(TrapezoidProfile(np.float64(0.2), 0.5, 0.5).triangular) is bool


def test_profile_positions_are_monotone_and_end_at_distance():
    profile = TrapezoidProfile(2.0, 0.5, 0.5)
    times = profile.sample_times(0.01)
    positions = [profile.position(t) for t in times]
    assert positions[0] == 0.0
    assert positions[-1] == 2.0
    assert all(b >= a for a, b in zip(positions, positions[1:]))
    assert profile.position(profile.t_accel) == pytest.approx(0.25)


def test_sample_times_include_phase_boundaries():
    profile = TrapezoidProfile(2.0, 0.5, 0.5)
    times = profile.sample_times(0.3)
    assert profile.t_accel in times and profile.t_decel in times
    assert times[-1] == profile.duration
    assert all(b > a for a, b in zip(times, times[1:]))


# ============= Planning =============
def test_zero_length_move(unit_scene):
    plan = plan_line_move(unit_scene, Pose.at(2, 1, 1), Pose.at(2, 1, 1))
    assert plan.duration == 0.0
    assert len(plan.samples) == 1


def test_plan_endpoints_and_times(hall_scene):
    start, goal = Pose.at(3.0, 4.0, 2.0), Pose.at(8.0, 7.5, 3.0)
    plan = plan_line_move(hall_scene, start, goal)
    assert plan.samples[0].time == 0.0
    assert plan.samples[-1].time == plan.duration
    assert all(b.time > a.time for a, b in zip(plan.samples, plan.samples[1:]))
    assert np.linalg.norm(plan.start.array() - start.array()) <= 1e-12
    assert np.linalg.norm(plan.goal.array() - goal.array()) <= 1e-12
    assert {limit.phase for limit in plan.governing_limits} >= {"accelerate", "decelerate"}


def test_plan_respects_drive_limits(hall_scene):
    plan = plan_line_move(hall_scene, Pose.at(2.0, 2.0, 1.0), Pose.at(10.0, 9.0, 4.0))
    _assert_within_limits(hall_scene, plan)


@pytest.mark.slow
def test_random_moves_respect_drive_limits(hall_scene):
    for start, goal in _random_moves(hall_scene, 1000, seed=31):
        plan = plan_line_move(hall_scene, start, goal, tick=settings.TICK_S)
        _assert_within_limits(hall_scene, plan)


def test_unreachable_endpoint(unit_scene):
    with pytest.raises(UnreachableEndpoint):
        plan_line_move(unit_scene, Pose.at(2, 1, 1), Pose.at(2, 1, 4.5))


def test_path_leaving_workspace():
    # The line cuts through the 1 m dead zone around the first anchor
    scene = make_scene(UNIT_ANCHORS, length_min=1.0)
    start, goal = Pose.at(0.1, 1.2, 3.8), Pose.at(1.2, 0.1, 3.8)
    checker = ReachabilityChecker(scene)
    assert not checker.violations(start.array()) and not checker.violations(goal.array())
    with pytest.raises(PathLeavesWorkspace) as exc:
        plan_line_move(scene, start, goal)
    assert 0.42 < exc.value.s < 0.46
    assert "length-bounds" in exc.value.violations


def test_time_reversal_gives_same_duration(hall_scene):
    a, b = Pose.at(2.5, 3.0, 1.5), Pose.at(9.0, 6.0, 4.0)
    assert plan_line_move(hall_scene, a, b).duration == pytest.approx(
        plan_line_move(hall_scene, b, a).duration, abs=1e-12
    )


def test_faster_drives_never_slow_the_move():
    slow = make_scene(UNIT_ANCHORS)
    fast = make_scene(UNIT_ANCHORS, speed_max=0.8, accel_max=0.9)
    a, b = Pose.at(1.0, 0.8, 1.0), Pose.at(3.0, 1.5, 2.0)
    assert plan_line_move(fast, a, b).duration <= plan_line_move(slow, a, b).duration


def test_multi_segment_path_stops_at_waypoints(hall_scene):
    waypoints = [Pose.at(3, 3, 2), Pose.at(6, 3, 2), Pose.at(6, 6, 3)]
    plan = plan_path(hall_scene, waypoints)
    first = plan_line_move(hall_scene, waypoints[0], waypoints[1])
    second = plan_line_move(hall_scene, waypoints[1], waypoints[2])
    assert plan.duration == pytest.approx(first.duration + second.duration, abs=1e-12)
    assert len(plan.segments) == 2
    assert plan.segments[1].t_start == pytest.approx(first.duration)
    junction = [s for s in plan.samples if abs(s.time - first.duration) < 1e-12]
    assert len(junction) == 1
    assert junction[0].pose == waypoints[1]
    assert all(b.time > a.time for a, b in zip(plan.samples, plan.samples[1:]))


# ============= Quantization =============
def test_quantize_length_rounds_to_nearest_step():
    assert quantize_length(3.7416573, 0.001, 0.0, 10.0) == pytest.approx(3.742, abs=1e-12)
    assert quantize_length(3.7404, 0.001, 0.0, 10.0) == pytest.approx(3.740, abs=1e-12)
    # Exact ties go toward the short side
    assert quantize_length(0.25, 0.5, 0.0, 10.0) == 0.0
    assert quantize_length(9.99, 1.0, 0.0, 9.5) == pytest.approx(9.0, abs=1e-12)
    assert quantize_length(0.02, 0.1, 0.15, 10.0) == pytest.approx(0.2, abs=1e-12)


def test_constant_pose_schedule(unit_scene):
    plan = plan_line_move(unit_scene, Pose.at(2, 1, 1), Pose.at(2, 1, 1))
    schedule = quantize_schedule(unit_scene, plan)
    assert len(schedule.times) == 1
    assert [len(c) for c in schedule.commanded] == [1, 1, 1]
    assert schedule.commanded[0][0] == pytest.approx(3.742, abs=1e-12)


def test_schedule_invariants(hall_scene):
    goal = Pose.at(9.0, 8.0, 4.0)
    plan = plan_line_move(hall_scene, Pose.at(2.0, 3.0, 1.0), goal)
    schedule = quantize_schedule(hall_scene, plan)
    target = inverse_kinematics(hall_scene, goal).values
    assert all(b > a for a, b in zip(schedule.times, schedule.times[1:]))
    for i, drive in enumerate(hall_scene.drives):
        steps = np.array(schedule.commanded[i]) / drive.resolution
        assert np.allclose(steps, np.round(steps), atol=1e-6)
        assert np.all(np.abs(np.diff(np.round(steps))) <= 1)
        assert min(schedule.commanded[i]) >= drive.length_min
        assert max(schedule.commanded[i]) <= drive.length_max
        assert abs(schedule.commanded[i][-1] - target[i]) <= drive.resolution / 2 + 1e-12
        assert schedule.drive_schedule(i)[0][0] == 0.0


def test_replayed_goal_within_quantization_bound(hall_scene):
    goal = Pose.at(5.0, 9.0, 2.5)
    plan = plan_line_move(hall_scene, Pose.at(7.0, 2.0, 3.5), goal)
    schedule = quantize_schedule(hall_scene, plan)
    final = [c[-1] for c in schedule.commanded]
    replayed = forward_kinematics_lsq(hall_scene, ChainLengths.of(final), goal)
    bound = quantization_bound(hall_scene, goal, schedule.resolutions)
    assert np.linalg.norm(replayed.array() - goal.array()) <= bound + 1e-6


# ============= Synchronization =============
def test_exact_replay_has_no_deviation(hall_scene):
    plan = plan_line_move(hall_scene, Pose.at(3.0, 3.0, 2.0), Pose.at(5.0, 6.0, 3.0))
    report = synchronization_check(hall_scene, exact_schedule(hall_scene, plan))
    assert report.synchronized
    assert report.max_deviation < 1e-7


def test_quantized_schedule_is_synchronized(hall_scene):
    plan = plan_line_move(hall_scene, Pose.at(3.0, 3.0, 2.0), Pose.at(8.0, 6.0, 3.5))
    schedule = quantize_schedule(hall_scene, plan)
    report = synchronization_check(hall_scene, schedule)
    assert report.synchronized
    assert 0 <= report.worst_tick < len(schedule.times)
    assert report.bound_at_worst > 0.0


def test_frozen_drive_breaks_synchronization(hall_scene):
    plan = plan_line_move(hall_scene, Pose.at(3.0, 3.0, 2.0), Pose.at(6.0, 5.0, 2.5))
    schedule = quantize_schedule(hall_scene, plan)
    half = len(schedule.times) // 2
    frozen = list(schedule.commanded)
    frozen[1] = tuple(list(frozen[1][:half]) + [frozen[1][half]] * (len(schedule.times) - half))
    broken = StepSchedule(
        times=schedule.times,
        commanded=tuple(frozen),
        resolutions=schedule.resolutions,
        planned_poses=schedule.planned_poses,
    )
    report = synchronization_check(hall_scene, broken)
    assert not report.synchronized
    assert report.max_deviation > synchronization_check(hall_scene, schedule).max_deviation


def test_zero_length_move_has_no_deviation(unit_scene):
    plan = plan_line_move(unit_scene, Pose.at(2, 1, 1), Pose.at(2, 1, 1))
    report = synchronization_check(unit_scene, exact_schedule(unit_scene, plan))
    assert report.max_deviation == pytest.approx(0.0, abs=1e-12)


@pytest.mark.slow
def test_random_quantized_moves_stay_synchronized(hall_scene):
    for start, goal in _random_moves(hall_scene, 1000, seed=37):
        plan = plan_line_move(hall_scene, start, goal, tick=settings.TICK_S)
        schedule = quantize_schedule(hall_scene, plan)
        target = inverse_kinematics(hall_scene, goal).values
        for i, drive in enumerate(hall_scene.drives):
            assert abs(schedule.commanded[i][-1] - target[i]) <= drive.resolution / 2 + 1e-12
        assert synchronization_check(hall_scene, schedule).synchronized
