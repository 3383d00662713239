"""
Shared fixtures: reference scenes and a builder for ad-hoc ones.
"""
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pytest

from app.scene.models import Scene
from app.scene.service import load_scene, validate_scene

SCENES_DIR = Path(__file__).resolve().parent / "scenes"

UNIT_ANCHORS = [[0.0, 0.0, 4.0], [4.0, 0.0, 4.0], [2.0, 3.0, 4.0]]
SQUARE_ANCHORS = [[0.0, 0.0, 4.0], [4.0, 0.0, 4.0], [4.0, 4.0, 4.0], [0.0, 4.0, 4.0]]
SYMMETRIC_ANCHORS = [[0.0, 0.0, 4.0], [6.0, 0.0, 4.0], [3.0, 3.0 * 3**0.5, 4.0]]
SYMMETRIC_POSE = (3.0, 3**0.5, 1.0)


def drive_values(anchor: Sequence[float], **overrides: Any) -> Dict[str, Any]:
    values = {
        "anchor": [float(v) for v in anchor],
        "length_min": 0.0,
        "length_max": 100.0,
        "stored_length": 100.0,
        "pitch": 0.0254,
        "resolution": 0.001,
        "speed_max": 0.5,
        "accel_max": 0.5,
        "error_coefficient": 2.0e-4,
        "tension_limit": 1.0e6,
        "compression_limit": 1.0e6,
    }
    values.update(overrides)
    return values


def scene_document(
    anchors: List[List[float]],
    room=(4.0, 4.0, 5.0),
    offsets: Optional[List[List[float]]] = None,
    mass: float = 0.0,
    payload_mass: float = 0.0,
    gravity: float = 9.80665,
    clearance: float = 0.0,
    **drive_overrides: Any,
) -> Dict[str, Any]:
    return {
        "room": {"size_x": float(room[0]), "size_y": float(room[1]), "size_z": float(room[2])},
        "gravity": gravity,
        "clearance": clearance,
        "platform": {
            "attachment_offsets": offsets or [[0.0, 0.0, 0.0] for _ in anchors],
            "mass": mass,
            "payload_mass": payload_mass,
        },
        "drives": [drive_values(a, **drive_overrides) for a in anchors],
    }


def make_scene(anchors: List[List[float]], **kwargs: Any) -> Scene:
    """Validated scene with generous limits unless overridden."""
    return validate_scene(scene_document(anchors, **kwargs))


@pytest.fixture
def unit_scene() -> Scene:
    return make_scene(UNIT_ANCHORS)


@pytest.fixture
def square_scene() -> Scene:
    return make_scene(SQUARE_ANCHORS)


@pytest.fixture
def symmetric_scene() -> Scene:
    """Equilateral anchors 6 m apart, 900 N load; platform 3 m below at SYMMETRIC_POSE."""
    return make_scene(SYMMETRIC_ANCHORS, room=(6.0, 6.0, 5.0), gravity=10.0, mass=50.0, payload_mass=40.0)


@pytest.fixture(scope="session")
def hall_scene() -> Scene:
    return load_scene(SCENES_DIR / "hall.json")


@pytest.fixture(scope="session")
def triangle_scene() -> Scene:
    return load_scene(SCENES_DIR / "triangle.json")
