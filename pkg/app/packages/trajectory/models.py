from typing import List, Tuple

from pydantic import BaseModel, ConfigDict

from app.scene.models import ChainLengths, Pose


class MotionSample(BaseModel):
    model_config = ConfigDict(frozen=True)

    time: float
    path_position: float
    pose: Pose
    lengths: ChainLengths


class PhaseLimit(BaseModel):
    """Which drive limit set the path speed or acceleration of a phase."""

    model_config = ConfigDict(frozen=True)

    phase: str
    drive: int
    limit: str
    value: float


class ProfileSegment(BaseModel):
    """One straight-line move inside a plan."""

    model_config = ConfigDict(frozen=True)

    start: Pose
    goal: Pose
    distance: float
    path_speed: float
    path_accel: float
    t_start: float
    duration: float
    triangular: bool


class MotionPlan(BaseModel):
    model_config = ConfigDict(frozen=True)

    samples: Tuple[MotionSample, ...]
    duration: float
    governing_limits: Tuple[PhaseLimit, ...] = ()
    segments: Tuple[ProfileSegment, ...] = ()

    @property
    def start(self) -> Pose:
        return self.samples[0].pose

    @property
    def goal(self) -> Pose:
        return self.samples[-1].pose


class StepSchedule(BaseModel):
    """Commanded lengths of every drive on one shared tick grid."""

    model_config = ConfigDict(frozen=True)

    times: Tuple[float, ...]
    # commanded[i][k]: drive i at times[k]
    commanded: Tuple[Tuple[float, ...], ...]
    resolutions: Tuple[float, ...]
    # Planned platform pose at each tick
    planned_poses: Tuple[Pose, ...]

    def drive_schedule(self, drive: int) -> List[Tuple[float, float]]:
        return list(zip(self.times, self.commanded[drive]))


class SyncReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    synchronized: bool
    max_deviation: float
    # Tick index where deviation/bound was largest
    worst_tick: int
    bound_at_worst: float
