"""
Workspace service layer - point reachability and reachable volume of the room.
"""
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from itertools import combinations
from typing import Callable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from app.core.exceptions import SingularGeometry
from app.packages.kinematics.service import MIN_CHAIN_LENGTH, chain_vectors
from app.packages.statics.service import force_margins, solve_axial_forces
from app.packages.workspace.geometry import segment_distance
from app.packages.workspace.models import (
    CONSTRAINTS,
    CellVerdict,
    CoverageReport,
    Reachability,
    SegmentCheck,
)
from app.scene.models import Point3, Pose, Scene

logger = logging.getLogger(__name__)

ANCHOR_PLANE_MARGIN = 1e-9

SlabResult = TypeVar("SlabResult")


class ReachabilityChecker:
    """Evaluates every workspace constraint at a point for one scene."""

    def __init__(self, scene: Scene):
        self.scene = scene
        self.anchors = scene.anchors()
        self.offsets = scene.offsets()
        self.anchor_list = self.anchors.tolist()
        self.sizes = scene.room.sizes()
        self.plane_z = float(scene.effective_anchors()[:, 2].min()) - ANCHOR_PLANE_MARGIN
        self.length_min = np.array([d.length_min for d in scene.drives])
        self.length_max = np.array([d.length_max for d in scene.drives])
        self.cone = np.array([d.gimbal_cone_half_angle for d in scene.drives])
        self.tension = np.array([d.tension_limit for d in scene.drives])
        self.compression = np.array([d.compression_limit for d in scene.drives])
        self.weight = scene.weight
        self.clearance = scene.clearance
        self.pairs = list(combinations(range(scene.n_drives), 2))

    def violations(self, point: Sequence[float], first_only: bool = False) -> List[str]:
        """
        Violated constraints at `point`, in CONSTRAINTS order.

        With `first_only` evaluation stops at the first hit.
        """
        found: List[str] = []
        p = np.asarray(point, dtype=float)

        if np.any(p < 0.0) or np.any(p > self.sizes):
            found.append("outside-room")
            if first_only:
                return found
        if not p[2] < self.plane_z:
            found.append("above-anchor-plane")
            if first_only:
                return found

        d, lengths = chain_vectors(self.anchors, self.offsets, p)
        if np.any(lengths < self.length_min) or np.any(lengths > self.length_max):
            found.append("length-bounds")
            if first_only:
                return found

        degenerate = bool(np.any(lengths <= MIN_CHAIN_LENGTH))
        angles = np.arctan2(np.hypot(d[:, 0], d[:, 1]), d[:, 2])
        if np.any((angles > self.cone) & (lengths > MIN_CHAIN_LENGTH)):
            found.append("gimbal-cone")
            if first_only:
                return found

        attach = (p + self.offsets).tolist()
        anchors = self.anchor_list
        for i, j in self.pairs:
            if segment_distance(attach[i], anchors[i], attach[j], anchors[j]) < self.clearance:
                found.append("chain-clearance")
                if first_only:
                    return found
                break

        if degenerate:
            found.append("singular-geometry")
            return found
        try:
            forces, _ = solve_axial_forces(d / lengths[:, None], self.weight)
        except SingularGeometry:
            found.append("singular-geometry")
            return found
        if np.any(force_margins(forces, self.tension, self.compression) < 0.0):
            found.append("force-limits")
        return found

    def check(self, point: Point3) -> Reachability:
        violations = self.violations(point.array())
        return Reachability(reachable=not violations, violations=tuple(violations))


def is_reachable(scene: Scene, point: Point3) -> Reachability:
    """Whether the platform can be held with its reference point at `point`."""
    return ReachabilityChecker(scene).check(point)


def segment_min_distance(seg_a: Tuple[Point3, Point3], seg_b: Tuple[Point3, Point3]) -> float:
    """Exact minimum distance between two closed segments; zero-length ones are points."""
    (a0, a1), (b0, b1) = seg_a, seg_b
    return segment_distance(
        (a0.x, a0.y, a0.z), (a1.x, a1.y, a1.z), (b0.x, b0.y, b0.z), (b1.x, b1.y, b1.z)
    )


def path_samples(distance: float, spacing: float) -> np.ndarray:
    """Path parameters 0..distance with at most `spacing` between neighbours."""
    count = max(1, math.ceil(distance / spacing))
    return np.arange(count + 1) * (distance / count)


def segment_reachable(scene: Scene, start: Pose, goal: Pose, spacing: float) -> SegmentCheck:
    """Check the straight segment start->goal at samples no more than `spacing` apart."""
    checker = ReachabilityChecker(scene)
    a, b = start.array(), goal.array()
    distance = float(np.linalg.norm(b - a))
    if distance == 0.0:
        violations = checker.violations(a)
        return SegmentCheck(reachable=not violations, s=None if not violations else 0.0,
                            violations=tuple(violations))

    direction = (b - a) / distance
    for s in path_samples(distance, spacing):
        violations = checker.violations(a + s * direction)
        if violations:
            logger.info(f"Segment blocked at s={s:.4f} m: {', '.join(violations)}")
            return SegmentCheck(reachable=False, s=float(s), violations=tuple(violations))
    return SegmentCheck(reachable=True)


# ============= Grid evaluation =============
def grid_axis_centers(size: float, count: int) -> List[float]:
    step = size / count
    return [(i + 0.5) * step for i in range(count)]


def grid_dims_for_resolution(scene: Scene, resolution: float) -> Tuple[int, int, int]:
    """Cells per axis so that each cell edge is at most `resolution`."""
    if not resolution > 0.0:
        raise ValueError("grid resolution must be positive")
    sizes = scene.room.sizes()
    nx, ny, nz = (max(2, math.ceil(s / resolution)) for s in sizes)
    return nx, ny, nz


def resolve_jobs(jobs: Optional[int]) -> int:
    if not jobs:
        return os.cpu_count() or 1
    return max(1, jobs)


def evaluate_grid(
    scene: Scene,
    grid_dims: Tuple[int, int, int],
    slab_fn: Callable[[Scene, Tuple[int, int, int], int], SlabResult],
    jobs: Optional[int] = 1,
) -> List[SlabResult]:
    """
    Run `slab_fn` for every x-slab of the grid, possibly in worker processes.

    Results come back in slab order whatever the worker count.
    """
    nx = grid_dims[0]
    workers = min(resolve_jobs(jobs), nx)
    if workers == 1:
        return [slab_fn(scene, grid_dims, ix) for ix in range(nx)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(slab_fn, [scene] * nx, [grid_dims] * nx, range(nx)))


def _coverage_slab(scene: Scene, grid_dims: Tuple[int, int, int], ix: int) -> List[int]:
    """First-violation code per (iy, iz) cell of slab ix; -1 when reachable."""
    checker = ReachabilityChecker(scene)
    _, ny, nz = grid_dims
    cx = grid_axis_centers(scene.room.size_x, grid_dims[0])[ix]
    ys = grid_axis_centers(scene.room.size_y, ny)
    zs = grid_axis_centers(scene.room.size_z, nz)
    codes = []
    for cy in ys:
        for cz in zs:
            violations = checker.violations((cx, cy, cz), first_only=True)
            codes.append(CONSTRAINTS.index(violations[0]) if violations else -1)
    return codes


def workspace_volume(
    scene: Scene,
    grid_dims: Tuple[int, int, int],
    jobs: Optional[int] = 1,
    keep_cells: bool = False,
) -> CoverageReport:
    """
    Classify the centre of every grid cell of the room.

    Args:
        scene: validated scene
        grid_dims: cells per axis, each >= 2
        jobs: worker processes (0/None for available parallelism)
        keep_cells: also return per-cell verdicts

    Returns:
        CoverageReport; identical for any worker count
    """
    if len(grid_dims) != 3 or any(n < 2 for n in grid_dims):
        raise ValueError("each grid dimension must be >= 2")
    nx, ny, nz = (int(n) for n in grid_dims)
    logger.info(f"Coverage on {nx}x{ny}x{nz} grid with {resolve_jobs(jobs)} worker(s)")

    slabs = evaluate_grid(scene, (nx, ny, nz), _coverage_slab, jobs)

    histogram = {name: 0 for name in CONSTRAINTS}
    reachable = 0
    cells: Optional[List[CellVerdict]] = [] if keep_cells else None
    xs = grid_axis_centers(scene.room.size_x, nx)
    ys = grid_axis_centers(scene.room.size_y, ny)
    zs = grid_axis_centers(scene.room.size_z, nz)

    for ix, codes in enumerate(slabs):
        for k, code in enumerate(codes):
            if code < 0:
                reachable += 1
            else:
                histogram[CONSTRAINTS[code]] += 1
            if cells is not None:
                iy, iz = divmod(k, nz)
                cells.append(CellVerdict(
                    ix, iy, iz, xs[ix], ys[iy], zs[iz],
                    code < 0, None if code < 0 else CONSTRAINTS[code],
                ))

    total = nx * ny * nz
    fraction = reachable / total
    logger.info(f"Coverage fraction {fraction:.4f} ({reachable}/{total})")
    return CoverageReport(
        grid_dims=(nx, ny, nz),
        cells_total=total,
        cells_reachable=reachable,
        fraction=fraction,
        rejection_histogram=histogram,
        cells=cells,
    )
