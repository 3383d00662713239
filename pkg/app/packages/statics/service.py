"""
Statics service layer - chain forces that hold the loaded platform.

Point equilibrium at the reference point: Σ f_i u_i = (0, 0, m g) with u_i
the unit vector from attachment i toward anchor i. Three chains give a
unique solution; more chains get the minimum-Euclidean-norm distribution.
"""
import logging
from typing import Iterable, Optional, Tuple

import numpy as np

from app.core.exceptions import DegeneratePose, SingularGeometry
from app.packages.kinematics.service import MIN_CHAIN_LENGTH, chain_vectors
from app.packages.statics.models import ForceCheck, ForceSolution
from app.scene.models import Pose, Scene

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12


def _condition(matrix: np.ndarray) -> float:
    with np.errstate(divide="ignore", invalid="ignore"):
        value = float(np.linalg.cond(matrix))
    return value if np.isfinite(value) else np.inf


def solve_axial_forces(directions: np.ndarray, weight: float) -> Tuple[np.ndarray, float]:
    """
    Forces along `directions` (N×3 unit rows) balancing a weight of `weight` newtons.

    Returns:
        (forces, residual norm)

    Raises:
        SingularGeometry: chain directions cannot carry the load
    """
    U = directions.T
    load = np.array([0.0, 0.0, weight])
    n = directions.shape[0]

    if n == 3:
        if _condition(U) > CONDITION_LIMIT:
            raise SingularGeometry("chain directions are coplanar")
        forces = np.linalg.solve(U, load)
    else:
        gram = U @ directions
        if _condition(gram) > CONDITION_LIMIT:
            raise SingularGeometry("chain directions do not span space")
        forces = directions @ np.linalg.solve(gram, load)

    residual = float(np.linalg.norm(U @ forces - load))
    return forces, residual


def force_margins(forces: np.ndarray, tension: np.ndarray, compression: np.ndarray) -> np.ndarray:
    """Capacity left per chain: tension limit for pulling chains, compression limit for pushing ones."""
    return np.where(forces >= 0.0, tension - forces, compression + forces)


def static_forces(scene: Scene, pose: Pose, active: Optional[Iterable[int]] = None) -> ForceSolution:
    """
    Axial forces holding the platform at `pose`.

    Args:
        scene: validated scene
        pose: platform pose
        active: chain indices that carry load (default all); the others get zero

    Raises:
        DegeneratePose: an attachment coincides with its anchor
        SingularGeometry: directions are degenerate
    """
    d, lengths = chain_vectors(scene.anchors(), scene.offsets(), pose.array())
    if np.any(lengths <= MIN_CHAIN_LENGTH):
        raise DegeneratePose("attachment coincides with its anchor")

    n = scene.n_drives
    indices = list(range(n)) if active is None else sorted(set(active))
    if any(i < 0 or i >= n for i in indices):
        raise ValueError(f"active chain indices must lie in 0..{n - 1}")
    if len(indices) < 3:
        raise SingularGeometry(f"{len(indices)} chains cannot hold a point load in 3D")

    directions = d[indices] / lengths[indices, None]
    partial, residual = solve_axial_forces(directions, scene.weight)
    forces = np.zeros(n)
    forces[indices] = partial

    tension = np.array([drive.tension_limit for drive in scene.drives])
    compression = np.array([drive.compression_limit for drive in scene.drives])
    margins = force_margins(forces, tension, compression)

    return ForceSolution(
        axial_forces=tuple(float(f) for f in forces),
        residual=residual,
        feasible=bool(np.all(margins >= 0.0)),
        margins=tuple(float(m) for m in margins),
    )


def force_feasible(scene: Scene, pose: Pose) -> ForceCheck:
    """
    Check every chain force against its limits.

    Reports the first chain over its limit and by how much.

    Raises:
        SingularGeometry
    """
    solution = static_forces(scene, pose)
    if solution.feasible:
        return ForceCheck(feasible=True, solution=solution)

    index = next(i for i, m in enumerate(solution.margins) if m < 0.0)
    excess = -solution.margins[index]
    logger.info(f"Force limit exceeded on chain {index} by {excess:.3f} N")
    return ForceCheck(feasible=False, chain_index=index, excess=excess, solution=solution)
