"""
Cumulative chain error and its propagation to platform position.
"""
import itertools
import math

import numpy as np
import pytest

from app.core.exceptions import SingularJacobian
from app.packages.accuracy.service import (
    chain_length_error,
    deployed_links,
    error_map,
    pose_error_bound,
    propagate_error,
)
from app.packages.kinematics.service import inverse_kinematics, jacobian
from app.packages.workspace.service import is_reachable
from app.scene.models import Point3, Pose
from conftest import SYMMETRIC_POSE, UNIT_ANCHORS, make_scene


def test_default_coefficient_gives_one_millimetre_at_five_metres(unit_scene):
    drive = unit_scene.drives[0]
    assert abs(chain_length_error(drive, 5.0) - 0.001) <= 1e-15
    assert chain_length_error(drive, 0.0) == 0.0
    assert chain_length_error(drive, 2.5) == pytest.approx(0.0005, abs=1e-15)


def test_negative_length_rejected(unit_scene):
    with pytest.raises(ValueError):
        chain_length_error(unit_scene.drives[0], -1.0)


def test_deployed_links(unit_scene):
    assert deployed_links(unit_scene.drives[0], 2.54) == pytest.approx(100.0)


def test_symmetric_error_is_vertical(symmetric_scene):
    estimate = propagate_error(symmetric_scene, Pose.at(*SYMMETRIC_POSE), [0.001] * 3)
    dx, dy, dz = estimate.position_error
    assert abs(dx) < 1e-12 and abs(dy) < 1e-12
    assert abs(dz) == pytest.approx(0.001 * math.sqrt(21) / 3, abs=1e-9)
    assert estimate.worst_case_norm >= math.hypot(dx, dy, dz)


def test_zero_chain_error_gives_zero(unit_scene):
    estimate = propagate_error(unit_scene, Pose.at(2, 1, 1), [0.0] * 3)
    assert estimate.position_error == (0.0, 0.0, 0.0)
    assert estimate.worst_case_norm == 0.0


def test_agrees_with_dense_solve(unit_scene):
    rng = np.random.default_rng(17)
    for _ in range(100):
        pose = Pose.of(rng.uniform([0.3, 0.3, 0.3], [3.7, 2.7, 3.0]))
        errors = rng.uniform(-0.002, 0.002, 3)
        J = jacobian(unit_scene, pose).array()
        expected = np.linalg.solve(J, errors)
        estimate = propagate_error(unit_scene, pose, errors)
        assert np.allclose(estimate.position_error, expected, rtol=0.0, atol=1e-12)
        assert np.allclose(J @ np.array(estimate.position_error), errors, rtol=0.0, atol=1e-12)


def test_worst_case_is_max_over_sign_patterns(square_scene):
    pose = Pose.at(1.1, 2.6, 1.4)
    errors = np.array([0.001, 0.0015, 0.0007, 0.0012])
    J = jacobian(square_scene, pose).array()
    brute = max(
        np.linalg.norm(np.linalg.lstsq(J, errors * np.array(signs), rcond=None)[0])
        for signs in itertools.product((1.0, -1.0), repeat=4)
    )
    estimate = propagate_error(square_scene, pose, errors)
    assert estimate.worst_case_norm == pytest.approx(brute, rel=1e-9)


def test_propagation_is_linear(unit_scene):
    pose = Pose.at(1.4, 0.9, 1.2)
    errors = [0.001, -0.0004, 0.0009]
    base = propagate_error(unit_scene, pose, errors)
    doubled = propagate_error(unit_scene, pose, [2.0 * e for e in errors])
    assert doubled.position_error == tuple(2.0 * v for v in base.position_error)


def test_worst_case_invariant_under_relabeling():
    pose = Pose.at(1.4, 0.9, 1.2)
    errors = [0.001, 0.0004, 0.0009]
    scene = make_scene(UNIT_ANCHORS)
    swapped = make_scene([UNIT_ANCHORS[2], UNIT_ANCHORS[0], UNIT_ANCHORS[1]])
    a = propagate_error(scene, pose, errors).worst_case_norm
    b = propagate_error(swapped, pose, [errors[2], errors[0], errors[1]]).worst_case_norm
    assert b == pytest.approx(a, rel=1e-12)


def test_singular_jacobian_rejected(unit_scene):
    with pytest.raises(SingularJacobian):
        propagate_error(unit_scene, Pose.at(2.0, 1.0, 4.0), [0.001] * 3)


def test_wrong_error_count_rejected(unit_scene):
    with pytest.raises(ValueError):
        propagate_error(unit_scene, Pose.at(2, 1, 1), [0.001] * 4)


def test_error_grows_toward_anchor_plane(symmetric_scene):
    x, y, _ = SYMMETRIC_POSE
    low = pose_error_bound(symmetric_scene, Pose.at(x, y, 0.5))
    high = pose_error_bound(symmetric_scene, Pose.at(x, y, 3.9))
    assert high > low


def test_error_map_zero_coefficient():
    scene = make_scene(UNIT_ANCHORS, error_coefficient=0.0)
    cells = error_map(scene, 1.0)
    assert cells
    assert all(c.worst_case_error == 0.0 for c in cells)


def test_error_map_covers_reachable_cells_in_row_major_order(unit_scene):
    cells = error_map(unit_scene, 1.0)
    # 4x4x5 cells, the top layer is above the anchors
    assert len(cells) == 4 * 4 * 4
    keys = [(c.cx, c.cy, c.cz) for c in cells]
    assert keys == sorted(keys)
    for cell in cells:
        assert is_reachable(unit_scene, Point3(x=cell.cx, y=cell.cy, z=cell.cz)).reachable


def test_error_map_values_match_recomputation(hall_scene):
    cells = error_map(hall_scene, 2.0)
    rng = np.random.default_rng(23)
    for index in rng.choice(len(cells), size=10, replace=False):
        cell = cells[index]
        pose = Pose.at(cell.cx, cell.cy, cell.cz)
        lengths = inverse_kinematics(hall_scene, pose).array()
        errors = 2.0e-4 * lengths
        J = jacobian(hall_scene, pose).array()
        worst = max(
            np.linalg.norm(np.linalg.pinv(J) @ (errors * np.array(signs)))
            for signs in itertools.product((1.0, -1.0), repeat=4)
        )
        assert cell.worst_case_error == pytest.approx(worst, rel=1e-9)


def test_error_map_rejects_bad_resolution(unit_scene):
    with pytest.raises(ValueError):
        error_map(unit_scene, 0.0)


def test_error_map_same_for_any_worker_count(hall_scene):
    assert error_map(hall_scene, 1.5, jobs=1) == error_map(hall_scene, 1.5, jobs=4)
