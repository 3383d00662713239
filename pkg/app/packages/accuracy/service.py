"""
Accuracy service layer - cumulative chain error and its effect on platform position.

Each deployed joint adds a little play, so a chain's length error grows
linearly with deployed length: δL = k·L. First order, δL = J δp.
"""
import itertools
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.core.exceptions import SingularJacobian
from app.packages.accuracy.models import ErrorCell, ErrorEstimate
from app.packages.kinematics.service import chain_vectors, jacobian_matrix
from app.packages.workspace.service import (
    ReachabilityChecker,
    evaluate_grid,
    grid_axis_centers,
    grid_dims_for_resolution,
)
from app.scene.models import ChainDrive, Pose, Scene

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12


def chain_length_error(drive: ChainDrive, length: float) -> float:
    """Accumulated joint-play error of `length` meters of deployed chain."""
    if length < 0.0:
        raise ValueError("chain length must be >= 0")
    return drive.error_coefficient * length


def deployed_links(drive: ChainDrive, length: float) -> float:
    """Number of chain links (joints) out of the housing at `length`."""
    if length < 0.0:
        raise ValueError("chain length must be >= 0")
    return length / drive.pitch


def _sign_matrix(n: int) -> np.ndarray:
    return np.array(list(itertools.product((1.0, -1.0), repeat=n)))


def error_inverse(J: np.ndarray) -> np.ndarray:
    """
    Map from chain-length errors to position error.

    Raises:
        SingularJacobian: condition number above CONDITION_LIMIT
    """
    if J.shape[0] == 3:
        try:
            inverse = np.linalg.inv(J)
        except np.linalg.LinAlgError:
            raise SingularJacobian("jacobian is singular")
        condition = np.linalg.norm(J, 2) * np.linalg.norm(inverse, 2)
    else:
        inverse = np.linalg.pinv(J)
        with np.errstate(divide="ignore"):
            condition = np.linalg.cond(J)
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        raise SingularJacobian(f"jacobian condition number {condition:.3e} exceeds {CONDITION_LIMIT:.0e}")
    return inverse


def propagate_matrix(inverse: np.ndarray, chain_errors: np.ndarray) -> Tuple[np.ndarray, float]:
    """(δp, worst-case |δp| over all 2^N sign patterns)."""
    dp = inverse @ chain_errors
    candidates = (_sign_matrix(len(chain_errors)) * chain_errors) @ inverse.T
    worst = float(np.sqrt(np.einsum("ij,ij->i", candidates, candidates).max()))
    return dp, worst


def propagate_error(scene: Scene, pose: Pose, chain_errors: Sequence[float]) -> ErrorEstimate:
    """
    First-order position error for chain length errors at `pose`.

    Three chains use the exact inverse; more chains use the least-squares
    solution of J δp ≈ δL.

    Raises:
        DegeneratePose, SingularJacobian
    """
    errors = np.asarray(chain_errors, dtype=float)
    if errors.shape != (scene.n_drives,):
        raise ValueError(f"expected {scene.n_drives} chain errors")
    inverse = error_inverse(jacobian_matrix(scene, pose))
    dp, worst = propagate_matrix(inverse, errors)
    return ErrorEstimate(
        chain_errors=tuple(float(e) for e in errors),
        position_error=(float(dp[0]), float(dp[1]), float(dp[2])),
        worst_case_norm=worst,
    )


def pose_error_bound(scene: Scene, pose: Pose) -> float:
    """Worst-case position error from cumulative chain error at `pose`."""
    _, lengths = chain_vectors(scene.anchors(), scene.offsets(), pose.array())
    errors = [chain_length_error(d, float(L)) for d, L in zip(scene.drives, lengths)]
    return propagate_error(scene, pose, errors).worst_case_norm


def _error_slab(scene: Scene, grid_dims: Tuple[int, int, int], ix: int) -> List[ErrorCell]:
    checker = ReachabilityChecker(scene)
    cx = grid_axis_centers(scene.room.size_x, grid_dims[0])[ix]
    cells = []
    for cy in grid_axis_centers(scene.room.size_y, grid_dims[1]):
        for cz in grid_axis_centers(scene.room.size_z, grid_dims[2]):
            if checker.violations((cx, cy, cz), first_only=True):
                continue
            worst = pose_error_bound(scene, Pose.at(cx, cy, cz))
            cells.append(ErrorCell(cx, cy, cz, worst))
    return cells


def error_map(scene: Scene, grid_resolution: float, jobs: Optional[int] = 1) -> List[ErrorCell]:
    """
    Worst-case position error at every reachable cell centre, row-major order.

    Raises:
        ValueError: grid_resolution not positive
    """
    dims = grid_dims_for_resolution(scene, grid_resolution)
    logger.info(f"Error map on {dims[0]}x{dims[1]}x{dims[2]} grid")
    slabs = evaluate_grid(scene, dims, _error_slab, jobs)
    cells = [cell for slab in slabs for cell in slab]
    logger.info(f"Error map covers {len(cells)} reachable cells")
    return cells
