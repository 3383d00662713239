"""
Trajectory service layer - synchronized straight-line moves of the platform.

The platform follows a trapezoidal (or triangular) profile along the line;
every chain follows through inverse kinematics. Path speed and acceleration
are chosen so that no drive exceeds its own limits anywhere on the line.
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.core.config import settings
from app.core.exceptions import InfeasibleQuantization, PathLeavesWorkspace, UnreachableEndpoint
from app.packages.accuracy.service import error_inverse, propagate_matrix
from app.packages.kinematics.service import chain_vectors, jacobian_matrix, search_box, solve_lengths_lsq
from app.packages.trajectory.models import (
    MotionPlan,
    MotionSample,
    PhaseLimit,
    ProfileSegment,
    StepSchedule,
    SyncReport,
)
from app.packages.workspace.geometry import point_segment_distance
from app.packages.workspace.service import ReachabilityChecker, path_samples, segment_reachable
from app.scene.models import ChainLengths, Pose, Scene

logger = logging.getLogger(__name__)

TIME_EPSILON = 1e-12
SYNC_BOUND_FACTOR = 2.0


# ============= Profile =============
class TrapezoidProfile:
    """Rest-to-rest trapezoidal motion law on s ∈ [0, distance]."""

    def __init__(self, distance: float, speed: float, accel: float):
        self.distance = distance
        self.accel = accel
        self.triangular = bool(distance < speed * speed / accel)
        if self.triangular:
            self.peak_speed = math.sqrt(accel * distance)
            self.t_accel = self.peak_speed / accel
            self.duration = 2.0 * math.sqrt(distance / accel)
            self.t_decel = self.t_accel
        else:
            self.peak_speed = speed
            self.t_accel = speed / accel
            self.duration = distance / speed + speed / accel
            self.t_decel = self.duration - self.t_accel

    def position(self, t: float) -> float:
        if t <= 0.0:
            return 0.0
        if t >= self.duration:
            return self.distance
        if t <= self.t_accel:
            return 0.5 * self.accel * t * t
        if t <= self.t_decel:
            return 0.5 * self.accel * self.t_accel**2 + self.peak_speed * (t - self.t_accel)
        remaining = self.duration - t
        return self.distance - 0.5 * self.accel * remaining * remaining

    def sample_times(self, tick: float) -> List[float]:
        """Fixed ticks plus exact phase boundaries, strictly increasing."""
        count = int(math.floor(self.duration / tick))
        times = sorted({k * tick for k in range(count + 1)} | {self.t_accel, self.t_decel, self.duration})
        merged = [times[0]]
        for t in times[1:]:
            if t - merged[-1] > TIME_EPSILON:
                merged.append(t)
            elif t in (self.t_accel, self.t_decel, self.duration):
                merged[-1] = t
        return merged


def profile_duration(distance: float, speed: float, accel: float) -> float:
    """Rest-to-rest time: d/v + v/a when d >= v²/a, else 2√(d/a)."""
    if distance <= 0.0:
        return 0.0
    return TrapezoidProfile(distance, speed, accel).duration


# ============= Path bounds =============
def path_derivative_bounds(
    scene: Scene, start: np.ndarray, goal: np.ndarray, spacing: float
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Per-drive bounds on |dL/ds| and |d²L/ds²| along the segment.

    |dL/ds| is the sampled maximum plus the drift allowed between samples;
    |d²L/ds²| = (1 - (dL/ds)²)/L is bounded by 1 / (closest approach of
    the line to the effective anchor).
    """
    centres = scene.effective_anchors()
    distance = float(np.linalg.norm(goal - start))
    direction = (goal - start) / distance
    s_values = path_samples(distance, spacing)
    step = s_values[1] - s_values[0] if len(s_values) > 1 else distance

    closest = np.array([
        point_segment_distance(tuple(c), tuple(start), tuple(goal)) for c in centres
    ])
    second = 1.0 / closest

    first = np.zeros(len(centres))
    for s in s_values:
        diff = start + s * direction - centres
        lengths = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        first = np.maximum(first, np.abs(diff @ direction) / lengths)
    first = np.minimum(1.0, first + 0.5 * step * second)
    return first, second


def _profile_limits(
    scene: Scene, first: np.ndarray, second: np.ndarray, label: str
) -> Tuple[float, float, List[PhaseLimit]]:
    """
    Largest path speed and acceleration keeping every drive in its limits.

    Each drive's acceleration budget is split evenly between the tangential
    term |dL/ds|·a and the curvature term |d²L/ds²|·v².
    """
    speed, speed_gov = math.inf, None
    accel, accel_gov = math.inf, None
    for i, drive in enumerate(scene.drives):
        if first[i] > 0.0:
            v_i = drive.speed_max / first[i]
            if v_i < speed:
                speed, speed_gov = v_i, (i, "speed_max")
            a_i = 0.5 * drive.accel_max / first[i]
            if a_i < accel:
                accel, accel_gov = a_i, (i, "accel_max")
        if second[i] > 0.0:
            v_i = math.sqrt(0.5 * drive.accel_max / second[i])
            if v_i < speed:
                speed, speed_gov = v_i, (i, "accel_max")

    limits = []
    if accel_gov is not None:
        limits.append(PhaseLimit(phase=f"{label}accelerate", drive=accel_gov[0], limit=accel_gov[1], value=accel))
    if speed_gov is not None:
        limits.append(PhaseLimit(phase=f"{label}cruise", drive=speed_gov[0], limit=speed_gov[1], value=speed))
    if accel_gov is not None:
        limits.append(PhaseLimit(phase=f"{label}decelerate", drive=accel_gov[0], limit=accel_gov[1], value=accel))
    return speed, accel, limits


# ============= Planning =============
def _sample(scene: Scene, t: float, s: float, p: np.ndarray) -> MotionSample:
    _, lengths = chain_vectors(scene.anchors(), scene.offsets(), p)
    return MotionSample(time=t, path_position=s, pose=Pose.of(p), lengths=ChainLengths.of(lengths))


def plan_line_move(scene: Scene, start: Pose, goal: Pose, tick: Optional[float] = None) -> MotionPlan:
    """
    Rest-to-rest straight-line move from `start` to `goal`.

    Args:
        scene: validated scene
        start, goal: endpoints, both reachable
        tick: output sample period in seconds (default settings.TICK_S)

    Raises:
        UnreachableEndpoint: either endpoint fails is_reachable
        PathLeavesWorkspace: some sample of the line fails is_reachable
    """
    tick = tick or settings.TICK_S
    if tick <= 0.0:
        raise ValueError("tick must be positive")
    spacing = settings.PATH_SAMPLE_SPACING_M

    checker = ReachabilityChecker(scene)
    for name, pose in (("start", start), ("goal", goal)):
        violations = checker.violations(pose.array())
        if violations:
            raise UnreachableEndpoint(f"{name} pose unreachable: {', '.join(violations)}")

    a, b = start.array(), goal.array()
    distance = float(np.linalg.norm(b - a))
    if distance == 0.0:
        logger.info("Zero-length move")
        return MotionPlan(samples=(_sample(scene, 0.0, 0.0, a),), duration=0.0)

    check = segment_reachable(scene, start, goal, spacing)
    if not check.reachable:
        raise PathLeavesWorkspace(check.s, list(check.violations))

    first, second = path_derivative_bounds(scene, a, b, spacing)
    speed, accel, limits = _profile_limits(scene, first, second, "")
    profile = TrapezoidProfile(distance, speed, accel)

    samples = []
    times = profile.sample_times(tick)
    for k, t in enumerate(times):
        s = profile.position(t)
        if k == 0:
            p = a
        elif k == len(times) - 1:
            p = b
        else:
            p = a + (s / distance) * (b - a)
        samples.append(_sample(scene, t, s, p))

    if profile.triangular:
        limits = [limit for limit in limits if not limit.phase.endswith("cruise")]
    logger.info(
        f"Planned {distance:.4f} m move: v={speed:.4f} m/s a={accel:.4f} m/s² "
        f"T={profile.duration:.4f} s ({len(samples)} samples)"
    )
    segment = ProfileSegment(
        start=start, goal=goal, distance=distance, path_speed=speed, path_accel=accel,
        t_start=0.0, duration=profile.duration, triangular=profile.triangular,
    )
    return MotionPlan(
        samples=tuple(samples),
        duration=profile.duration,
        governing_limits=tuple(limits),
        segments=(segment,),
    )


def plan_path(scene: Scene, waypoints: Sequence[Pose], tick: Optional[float] = None) -> MotionPlan:
    """Straight moves through `waypoints`, stopping at each one."""
    if len(waypoints) < 2:
        raise ValueError("a path needs at least two waypoints")

    samples: List[MotionSample] = []
    limits: List[PhaseLimit] = []
    segments: List[ProfileSegment] = []
    offset = 0.0
    travelled = 0.0
    for k, (a, b) in enumerate(zip(waypoints[:-1], waypoints[1:])):
        plan = plan_line_move(scene, a, b, tick)
        if plan.duration == 0.0 and samples:
            continue
        for j, sample in enumerate(plan.samples):
            if j == 0 and samples:
                continue
            samples.append(sample.model_copy(update={
                "time": sample.time + offset,
                "path_position": sample.path_position + travelled,
            }))
        limits.extend(limit.model_copy(update={"phase": f"segment {k}: {limit.phase}"})
                      for limit in plan.governing_limits)
        segments.extend(seg.model_copy(update={"t_start": offset}) for seg in plan.segments)
        offset += plan.duration
        travelled += sum(seg.distance for seg in plan.segments)

    return MotionPlan(
        samples=tuple(samples),
        duration=offset,
        governing_limits=tuple(limits),
        segments=tuple(segments),
    )


# ============= Quantization =============
def quantize_length(length: float, resolution: float, length_min: float, length_max: float) -> float:
    """
    Nearest multiple of `resolution` inside the drive bounds; ties go toward length_min.

    Bounds that are not step multiples clamp inward to the last whole step, so a
    target at such a bound can end up to one full step away.
    """
    k = math.ceil(length / resolution - 0.5)
    k_min = math.ceil(length_min / resolution - 1e-9)
    k_max = math.floor(length_max / resolution + 1e-9)
    return min(max(k, k_min), k_max) * resolution


def quantize_schedule(scene: Scene, plan: MotionPlan) -> StepSchedule:
    """
    Sprocket-step schedule for every drive on one shared tick grid.

    An interval where some drive would move more than one step is split into
    sub-ticks for all drives; each drive then commands the rounding of its
    linearly interpolated length, so no drive moves more than one step per tick.

    Raises:
        InfeasibleQuantization: a drive needs more steps in an interval than its
            speed limit allows (one step of rounding slack)
    """
    drives = scene.drives
    n = len(drives)
    resolution = np.array([d.resolution for d in drives])
    lo = [d.length_min for d in drives]
    hi = [d.length_max for d in drives]

    def rounded(lengths: np.ndarray) -> List[float]:
        return [quantize_length(float(lengths[i]), resolution[i], lo[i], hi[i]) for i in range(n)]

    first = plan.samples[0]
    times = [first.time]
    poses = [first.pose]
    columns = [rounded(first.lengths.array())]

    for prev, cur in zip(plan.samples[:-1], plan.samples[1:]):
        l_prev, l_cur = prev.lengths.array(), cur.lengths.array()
        p_prev, p_cur = prev.pose.array(), cur.pose.array()
        dt = cur.time - prev.time
        end = rounded(l_cur)

        for i, drive in enumerate(drives):
            steps = round(abs(end[i] - columns[-1][i]) / resolution[i])
            allowed = math.floor(drive.speed_max * dt / resolution[i] + 1e-9) + 1
            if steps > allowed:
                raise InfeasibleQuantization(
                    f"drive {i} needs {steps} steps in {dt:.4f} s, speed limit allows {allowed}"
                )

        subdivisions = int(np.max(np.floor(np.abs(l_cur - l_prev) / resolution))) + 1
        for j in range(1, subdivisions + 1):
            if j == subdivisions:
                times.append(cur.time)
                poses.append(cur.pose)
                columns.append(end)
                continue
            f = j / subdivisions
            times.append(prev.time + f * dt)
            poses.append(Pose.of(p_prev + f * (p_cur - p_prev)))
            columns.append(rounded(l_prev + f * (l_cur - l_prev)))

    commanded = tuple(tuple(column[i] for column in columns) for i in range(n))
    logger.info(f"Quantized {len(plan.samples)} samples into {len(times)} ticks")
    return StepSchedule(
        times=tuple(times),
        commanded=commanded,
        resolutions=tuple(float(r) for r in resolution),
        planned_poses=tuple(poses),
    )


def exact_schedule(scene: Scene, plan: MotionPlan) -> StepSchedule:
    """Plan samples as a schedule without rounding; the reference for replay checks."""
    return StepSchedule(
        times=tuple(s.time for s in plan.samples),
        commanded=tuple(
            tuple(s.lengths.values[i] for s in plan.samples) for i in range(scene.n_drives)
        ),
        resolutions=tuple(d.resolution for d in scene.drives),
        planned_poses=tuple(s.pose for s in plan.samples),
    )


# ============= Synchronization =============
def quantization_bound(scene: Scene, pose: Pose, resolutions: Sequence[float]) -> float:
    """Worst-case position error from half a step of rounding on every drive."""
    inverse = error_inverse(jacobian_matrix(scene, pose))
    _, worst = propagate_matrix(inverse, 0.5 * np.asarray(resolutions, dtype=float))
    return worst


def synchronization_check(scene: Scene, schedule: StepSchedule) -> SyncReport:
    """
    Replay the schedule through forward kinematics and compare with the plan.

    Synchronized iff at every tick the reconstructed pose is closer to the
    planned pose than twice the quantization error bound there.

    Raises:
        NoConvergence, DivergedGuess: forward kinematics failed at some tick
    """
    centres = scene.effective_anchors()
    box = search_box(scene)
    guess = schedule.planned_poses[0].array()

    synchronized = True
    max_deviation, worst_tick, worst_ratio, bound_at_worst = 0.0, 0, -1.0, 0.0
    for k, planned in enumerate(schedule.planned_poses):
        lengths = np.array([column[k] for column in schedule.commanded])
        p = solve_lengths_lsq(centres, lengths, guess, box)
        deviation = float(np.linalg.norm(p - planned.array()))
        bound = SYNC_BOUND_FACTOR * quantization_bound(scene, planned, schedule.resolutions)
        if deviation >= bound:
            synchronized = False
        ratio = deviation / bound if bound > 0.0 else math.inf
        if ratio > worst_ratio:
            worst_ratio, worst_tick, bound_at_worst = ratio, k, bound
        max_deviation = max(max_deviation, deviation)
        guess = p

    if not synchronized:
        logger.warning(f"Schedule out of sync at tick {worst_tick} (max deviation {max_deviation:.3e} m)")
    return SyncReport(
        synchronized=synchronized,
        max_deviation=max_deviation,
        worst_tick=worst_tick,
        bound_at_worst=bound_at_worst,
    )
