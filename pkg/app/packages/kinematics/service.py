"""
Kinematics service layer - maps platform poses to chain lengths and back.

Chains are straight rigid members: chain i runs from the gimbal centre
p + r_i to its anchor a_i, so L_i = |a_i - (p + r_i)|. Because the offsets
r_i are fixed world vectors, p lies on the sphere of radius L_i around the
effective anchor a_i' = a_i - r_i.
"""
import logging
from typing import Tuple

import numpy as np

from app.core.exceptions import (
    AmbiguousSolution,
    DegeneratePose,
    DivergedGuess,
    NoConvergence,
    NoIntersection,
)
from app.packages.kinematics.models import Jacobian
from app.scene.models import ChainLengths, Pose, Scene

logger = logging.getLogger(__name__)

MIN_CHAIN_LENGTH = 1e-9
TANGENCY_TOLERANCE = 1e-9       # m², on the squared out-of-plane offset
MIRROR_TOLERANCE = 1e-12        # m, between the two mirror heights

LSQ_MAX_ITERATIONS = 100
LSQ_DAMPING_START = 1e-3
LSQ_DAMPING_FACTOR = 10.0
LSQ_GRADIENT_TOLERANCE = 1e-10
LSQ_STEP_TOLERANCE = 1e-12
LSQ_SEARCH_BOX_SCALE = 10.0


def chain_vectors(anchors: np.ndarray, offsets: np.ndarray, p: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Vectors attachment -> anchor (N×3) and their lengths (N)."""
    d = anchors - (p + offsets)
    return d, np.sqrt(np.einsum("ij,ij->i", d, d))


def inverse_kinematics(scene: Scene, pose: Pose) -> ChainLengths:
    """
    Chain lengths holding the platform at `pose`.

    Length limits are not enforced here; see workspace.is_reachable.
    """
    _, lengths = chain_vectors(scene.anchors(), scene.offsets(), pose.array())
    return ChainLengths.of(lengths)


def trilaterate(centres: np.ndarray, radii: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Both intersection points of three spheres, lower one first.

    Raises:
        NoIntersection: the spheres miss each other by more than the tangency tolerance
    """
    p1, p2, p3 = centres
    r1, r2, r3 = radii

    ex = p2 - p1
    d = np.linalg.norm(ex)
    ex = ex / d
    i = float(np.dot(ex, p3 - p1))
    ey = p3 - p1 - i * ex
    ey = ey / np.linalg.norm(ey)
    ez = np.cross(ex, ey)
    j = float(np.dot(ey, p3 - p1))

    x = (r1**2 - r2**2 + d**2) / (2 * d)
    y = (r1**2 - r3**2 + i**2 + j**2) / (2 * j) - (i / j) * x
    z_sq = r1**2 - x**2 - y**2

    if z_sq < -TANGENCY_TOLERANCE:
        raise NoIntersection(f"length spheres do not intersect (z² = {z_sq:.3e} m²)")
    # Slightly negative values inside the tangency band are rounding; clamp them
    z = np.sqrt(max(z_sq, 0.0))

    base = p1 + x * ex + y * ey
    a, b = base + z * ez, base - z * ez
    return (a, b) if a[2] <= b[2] else (b, a)


def forward_kinematics_3(scene: Scene, lengths: ChainLengths) -> Pose:
    """
    Closed-form pose of a three-chain platform.

    Returns the intersection below the effective-anchor plane.

    Raises:
        NoIntersection, AmbiguousSolution
    """
    if scene.n_drives != 3 or len(lengths) != 3:
        raise ValueError("forward_kinematics_3 needs exactly 3 drives and 3 lengths")

    lower, upper = trilaterate(scene.effective_anchors(), lengths.array())
    if abs(upper[2] - lower[2]) < MIRROR_TOLERANCE:
        raise AmbiguousSolution("mirror solutions have the same height")
    return Pose.of(lower)


def search_box(scene: Scene) -> Tuple[np.ndarray, np.ndarray]:
    sizes = scene.room.sizes()
    centre = sizes / 2
    half = sizes * LSQ_SEARCH_BOX_SCALE / 2
    return centre - half, centre + half


def default_guess(scene: Scene) -> Pose:
    """Seed below the effective-anchor plane: centroid in plan, half the lowest anchor height."""
    eff = scene.effective_anchors()
    x, y = eff[:, :2].mean(axis=0)
    return Pose.at(x, y, 0.5 * eff[:, 2].min())


def solve_lengths_lsq(
    centres: np.ndarray,
    lengths: np.ndarray,
    guess: np.ndarray,
    box: Tuple[np.ndarray, np.ndarray],
) -> np.ndarray:
    """
    Damped Gauss-Newton on min_p Σ (|p - c_i| - L_i)².

    A step is accepted only when the squared residual drops; the damping is
    divided by 10 on acceptance and multiplied by 10 on rejection.
    """
    lo, hi = box
    p = np.array(guess, dtype=float)
    if np.any(p < lo) or np.any(p > hi):
        raise DivergedGuess("initial guess outside the search box")

    def residual(q: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        diff = q - centres
        dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        return diff, dist

    diff, dist = residual(p)
    r = dist - lengths
    cost = float(r @ r)
    damping = LSQ_DAMPING_START

    for iteration in range(1, LSQ_MAX_ITERATIONS + 1):
        if np.any(dist <= MIN_CHAIN_LENGTH):
            raise DegeneratePose("iterate coincides with an effective anchor")
        J = diff / dist[:, None]
        gradient = J.T @ r
        if np.linalg.norm(gradient) < LSQ_GRADIENT_TOLERANCE:
            logger.debug(f"LSQ converged on gradient after {iteration - 1} iterations")
            return p

        step = np.linalg.solve(J.T @ J + damping * np.eye(3), -gradient)
        if np.linalg.norm(step) < LSQ_STEP_TOLERANCE:
            logger.debug(f"LSQ converged on step after {iteration - 1} iterations")
            return p

        candidate = p + step
        if np.any(candidate < lo) or np.any(candidate > hi):
            raise DivergedGuess(f"iterate left the search box at iteration {iteration}")

        c_diff, c_dist = residual(candidate)
        c_r = c_dist - lengths
        c_cost = float(c_r @ c_r)
        if c_cost < cost:
            p, diff, dist, r, cost = candidate, c_diff, c_dist, c_r, c_cost
            damping /= LSQ_DAMPING_FACTOR
        else:
            damping *= LSQ_DAMPING_FACTOR

    raise NoConvergence(LSQ_MAX_ITERATIONS, float(np.sqrt(cost)))


def forward_kinematics_lsq(scene: Scene, lengths: ChainLengths, initial_guess: Pose) -> Pose:
    """
    Least-squares pose for any N >= 3 chains.

    Converges to the basin of `initial_guess`; seed it below the anchor
    plane to get the hanging solution.

    Raises:
        NoConvergence, DivergedGuess
    """
    if len(lengths) != scene.n_drives:
        raise ValueError(f"expected {scene.n_drives} lengths, got {len(lengths)}")
    p = solve_lengths_lsq(
        scene.effective_anchors(), lengths.array(), initial_guess.array(), search_box(scene)
    )
    return Pose.of(p)


def _checked_vectors(scene: Scene, pose: Pose) -> Tuple[np.ndarray, np.ndarray]:
    d, lengths = chain_vectors(scene.anchors(), scene.offsets(), pose.array())
    if np.any(lengths <= MIN_CHAIN_LENGTH):
        idx = int(np.argmin(lengths))
        raise DegeneratePose(f"attachment {idx} coincides with its anchor")
    return d, lengths


def jacobian_matrix(scene: Scene, pose: Pose) -> np.ndarray:
    d, lengths = _checked_vectors(scene, pose)
    return -d / lengths[:, None]


def jacobian(scene: Scene, pose: Pose) -> Jacobian:
    """
    dL/dp at `pose`.

    Raises:
        DegeneratePose: some chain has zero length
    """
    return Jacobian.of(jacobian_matrix(scene, pose))


def gimbal_angles(scene: Scene, pose: Pose) -> np.ndarray:
    d, _ = _checked_vectors(scene, pose)
    return np.arctan2(np.hypot(d[:, 0], d[:, 1]), d[:, 2])


def gimbal_angle(scene: Scene, pose: Pose, chain_index: int) -> float:
    """Angle between chain `chain_index` (attachment -> anchor) and world vertical."""
    return float(gimbal_angles(scene, pose)[chain_index])
