"""
Shared click parameter types and options for the command modules.
"""
import functools
import math
from typing import Callable, List, Optional

import click

from app.core.config import settings
from app.scene.models import Pose, Scene
from app.scene.service import load_scene


class FloatList(click.ParamType):
    """Comma-separated finite floats, e.g. `2,1,1`."""

    name = "floats"

    def __init__(self, count: Optional[int] = None, min_count: int = 1):
        self.count = count
        self.min_count = min_count

    def convert(self, value, param, ctx) -> List[float]:
        if isinstance(value, (list, tuple)):
            return [float(v) for v in value]
        try:
            numbers = [float(part) for part in str(value).split(",")]
        except ValueError:
            self.fail(f"{value!r} is not a comma-separated list of numbers", param, ctx)
        if not all(math.isfinite(v) for v in numbers):
            self.fail(f"{value!r} contains a non-finite number", param, ctx)
        if self.count is not None and len(numbers) != self.count:
            self.fail(f"expected {self.count} values, got {len(numbers)}", param, ctx)
        if len(numbers) < self.min_count:
            self.fail(f"expected at least {self.min_count} values, got {len(numbers)}", param, ctx)
        return numbers


class GridDims(FloatList):
    name = "nx,ny,nz"

    def __init__(self):
        super().__init__(count=3)

    def convert(self, value, param, ctx):
        numbers = super().convert(value, param, ctx)
        if any(n != int(n) or n < 2 for n in numbers):
            self.fail("grid dimensions must be integers >= 2", param, ctx)
        return tuple(int(n) for n in numbers)


VECTOR3 = FloatList(count=3)
GRID_DIMS = GridDims()


def to_pose(values: List[float]) -> Pose:
    return Pose.at(*values)


def scene_option(f: Callable) -> Callable:
    """Add `--scene FILE` and pass the loaded Scene as `scene`."""

    @click.option(
        "--scene", "scene_path", required=True,
        help=f"Scene JSON file; bare names are also looked up in {settings.SCENES_DIR}",
    )
    @functools.wraps(f)
    def wrapper(*args, scene_path: str, **kwargs):
        scene: Scene = load_scene(scene_path)
        return f(*args, scene=scene, **kwargs)

    return wrapper


def jobs_option(f: Callable) -> Callable:
    return click.option(
        "--jobs", type=click.IntRange(min=0), default=None,
        help="Worker processes (0 = available parallelism; default from JOBS)",
    )(f)


def resolve_jobs_setting(jobs: Optional[int]) -> int:
    return settings.JOBS if jobs is None else jobs
