"""
Scene service layer - validation, file I/O and reference layouts.
"""
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

from app.core.exceptions import InvalidScene, SceneParseError
from app.db.store import JsonStore
from app.scene.models import ChainDrive, Platform, Point3, Room, Scene
from app.scene.schemas import SceneDocument

logger = logging.getLogger(__name__)

MIN_DRIVES = 3
MAX_DRIVES = 8
COMPRESSION_DEFAULT_RATIO = 0.25
# Second singular value of the centred effective anchors, relative to the first
COLLINEAR_TOLERANCE = 1e-10
# Length bounds within this many steps of a whole step count as step multiples
STEP_MULTIPLE_TOLERANCE = 1e-6

LayoutKind = Literal["triangle", "corners"]


def _line_of(text: Optional[str], loc: Tuple[Any, ...]) -> Optional[int]:
    """Best-effort source line of a schema error location."""
    if not text:
        return None
    for key in reversed(loc):
        if isinstance(key, str):
            idx = text.find(f'"{key}"')
            if idx >= 0:
                return text.count("\n", 0, idx) + 1
    return 1


def parse_document(data: Dict[str, Any], text: Optional[str] = None) -> SceneDocument:
    """
    Check a decoded scene document against the file schema.

    Raises:
        SceneParseError: missing/unknown keys or wrongly typed values
    """
    try:
        return SceneDocument.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        loc = tuple(first.get("loc", ()))
        where = ".".join(str(part) for part in loc) or "<document>"
        raise SceneParseError(_line_of(text, loc), f"{where}: {first.get('msg', 'invalid value')}")


def _check_drive(i: int, drive: Dict[str, Any], room: Room, add) -> None:
    numbers = [v for k, v in drive.items() if k != "anchor"] + list(drive["anchor"])
    if not all(math.isfinite(v) for v in numbers):
        add("non-finite", f"drive {i}: non-finite value")
        return

    if not (0.0 <= drive["length_min"] < drive["length_max"] <= drive["stored_length"]):
        add("length-bounds", f"drive {i}: need 0 <= length_min < length_max <= stored_length")
    if not (0.0 < drive["resolution"] <= drive["pitch"]):
        add("resolution-bounds", f"drive {i}: need 0 < resolution <= pitch")
    if drive["speed_max"] <= 0.0 or drive["accel_max"] <= 0.0:
        add("motion-limits", f"drive {i}: speed_max and accel_max must be positive")
    if drive["error_coefficient"] < 0.0:
        add("error-coefficient", f"drive {i}: error_coefficient must be >= 0")
    if drive["tension_limit"] <= 0.0 or drive["compression_limit"] <= 0.0:
        add("force-limits", f"drive {i}: tension_limit and compression_limit must be positive")
    if not (0.0 < drive["gimbal_cone_half_angle"] <= math.pi / 2):
        add("gimbal-cone", f"drive {i}: need 0 < gimbal_cone_half_angle <= pi/2")
    if not room.contains(Point3.of(drive["anchor"])):
        add("anchor-outside-room", f"drive {i}: anchor outside the room box")


def _off_step_bounds(drives: List[Dict[str, Any]]) -> List[int]:
    """Drives whose length bounds are not whole sprocket steps."""
    off = []
    for i, d in enumerate(drives):
        steps = [d[key] / d["resolution"] for key in ("length_min", "length_max")]
        if any(abs(k - round(k)) > STEP_MULTIPLE_TOLERANCE for k in steps):
            off.append(i)
    return off


def _effective_anchors_collinear(drives: List[Dict[str, Any]], offsets: List[List[float]]) -> bool:
    eff = np.array([d["anchor"] for d in drives], dtype=float) - np.array(offsets, dtype=float)
    centred = eff - eff.mean(axis=0)
    sv = np.linalg.svd(centred, compute_uv=False)
    return sv[0] == 0.0 or sv[1] <= COLLINEAR_TOLERANCE * sv[0]


def validate_scene(raw: Union[SceneDocument, Scene, Dict[str, Any]]) -> Scene:
    """
    Validate a scene description and build the immutable Scene.

    Args:
        raw: a decoded document, a SceneDocument or an existing Scene

    Returns:
        Validated Scene

    Raises:
        SceneParseError: the description does not match the file schema
        InvalidScene: listing every violated invariant
    """
    if isinstance(raw, Scene):
        raw = scene_to_document(raw)
    document = raw if isinstance(raw, SceneDocument) else parse_document(raw)

    violations: List[str] = []
    details: List[str] = []

    def add(name: str, detail: str) -> None:
        if name not in violations:
            violations.append(name)
        details.append(detail)

    room_sizes = [document.room.size_x, document.room.size_y, document.room.size_z]
    if not all(math.isfinite(v) for v in room_sizes):
        add("non-finite", "room: non-finite size")
    elif min(room_sizes) <= 0.0:
        add("room-size", "room: all sizes must be positive")
    room = Room(**document.room.model_dump())

    if not math.isfinite(document.gravity) or document.gravity < 0.0:
        add("gravity", "gravity must be finite and >= 0")
    if not math.isfinite(document.clearance) or document.clearance < 0.0:
        add("clearance", "clearance must be finite and >= 0")

    n = len(document.drives)
    if not (MIN_DRIVES <= n <= MAX_DRIVES):
        add("drive-count", f"need {MIN_DRIVES}..{MAX_DRIVES} drives, got {n}")

    drives: List[Dict[str, Any]] = []
    for i, d in enumerate(document.drives):
        values = d.model_dump()
        if values["compression_limit"] is None:
            values["compression_limit"] = COMPRESSION_DEFAULT_RATIO * values["tension_limit"]
        if values["gimbal_cone_half_angle"] is None:
            values["gimbal_cone_half_angle"] = math.pi / 2
        _check_drive(i, values, room, add)
        drives.append(values)

    platform = document.platform
    offsets = [list(r) for r in platform.attachment_offsets]
    if not all(math.isfinite(v) for r in offsets for v in r) or not all(
        math.isfinite(v) for v in (platform.mass, platform.payload_mass)
    ):
        add("non-finite", "platform: non-finite value")
    if len(offsets) != n:
        add("offsets-count", f"platform has {len(offsets)} attachment offsets for {n} drives")
    if platform.mass < 0.0 or platform.payload_mass < 0.0:
        add("platform-mass", "platform mass and payload_mass must be >= 0")

    if (
        len(offsets) == n >= MIN_DRIVES
        and "non-finite" not in violations
        and _effective_anchors_collinear(drives, offsets)
    ):
        add("anchors-collinear", "effective anchors are collinear")

    if violations:
        logger.warning(f"Scene rejected: {', '.join(violations)}")
        raise InvalidScene(violations, details)

    # Clamped commands at such a bound can sit up to a full step from the target
    for i in _off_step_bounds(drives):
        logger.warning(f"Drive {i}: length bounds are not multiples of the resolution")

    return Scene(
        room=room,
        drives=tuple(
            ChainDrive(**{**values, "anchor": Point3.of(values["anchor"])}) for values in drives
        ),
        platform=Platform(
            attachment_offsets=tuple(Point3.of(r) for r in offsets),
            mass=platform.mass,
            payload_mass=platform.payload_mass,
        ),
        gravity=document.gravity,
        clearance=document.clearance,
    )


def scene_to_document(scene: Scene) -> Dict[str, Any]:
    """Scene file representation with every default written out."""
    return {
        "room": scene.room.model_dump(),
        "gravity": scene.gravity,
        "clearance": scene.clearance,
        "platform": {
            "attachment_offsets": [[r.x, r.y, r.z] for r in scene.platform.attachment_offsets],
            "mass": scene.platform.mass,
            "payload_mass": scene.platform.payload_mass,
        },
        "drives": [
            {
                **drive.model_dump(exclude={"anchor"}),
                "anchor": [drive.anchor.x, drive.anchor.y, drive.anchor.z],
            }
            for drive in scene.drives
        ],
    }


def load_scene(path: Union[str, Path]) -> Scene:
    """
    Read, parse and validate a scene file.

    Raises:
        SceneFileError, SceneParseError, InvalidScene
    """
    text = JsonStore.read_text(path)
    document = parse_document(JsonStore.loads(text), text)
    scene = validate_scene(document)
    logger.info(f"Loaded scene {path}: {scene.n_drives} drives")
    return scene


def save_scene(scene: Scene, path: Union[str, Path]) -> None:
    JsonStore.write(path, scene_to_document(scene))
    logger.info(f"Saved scene to {path}")


def layout_anchors(room: Room, layout: LayoutKind) -> List[List[float]]:
    """Ceiling anchor positions of the two reference arrangements."""
    x, y, z = room.size_x, room.size_y, room.size_z
    if layout == "triangle":
        return [[0.0, 0.0, z], [x, 0.0, z], [x / 2, y, z]]
    if layout == "corners":
        return [[0.0, 0.0, z], [x, 0.0, z], [x, y, z], [0.0, y, z]]
    raise ValueError(f"Unknown layout: {layout}")


def build_layout_scene(
    room: Room,
    template: ChainDrive,
    layout: LayoutKind,
    mass: float,
    payload_mass: float = 0.0,
    offset: float = 0.3,
    gravity: float = 9.80665,
    clearance: float = 0.05,
) -> Scene:
    """
    Build a scene with identical drives in a reference arrangement.

    Each attachment offset points from the platform centre toward its own
    anchor in plan view, `offset` meters along each horizontal axis.
    """
    anchors = layout_anchors(room, layout)
    centre = np.array([room.size_x / 2, room.size_y / 2])
    offsets = []
    for a in anchors:
        sign = np.sign(np.array(a[:2]) - centre)
        offsets.append([float(offset * sign[0]), float(offset * sign[1]), 0.0])

    drive_values = template.model_dump(exclude={"anchor"})
    document = {
        "room": room.model_dump(),
        "gravity": gravity,
        "clearance": clearance,
        "platform": {"attachment_offsets": offsets, "mass": mass, "payload_mass": payload_mass},
        "drives": [{**drive_values, "anchor": a} for a in anchors],
    }
    logger.info(f"Built {layout} layout in {room.size_x}x{room.size_y}x{room.size_z} m room")
    return validate_scene(document)
