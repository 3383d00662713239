"""
Validated, immutable world model. Build these through scene.service.validate_scene.
"""
import math
from typing import Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True)


class Point3(_Frozen):
    x: float
    y: float
    z: float

    @classmethod
    def of(cls, values: Sequence[float]) -> "Point3":
        x, y, z = (float(v) for v in values)
        return cls(x=x, y=y, z=z)

    def array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


class Room(_Frozen):
    size_x: float
    size_y: float
    size_z: float

    def sizes(self) -> np.ndarray:
        return np.array([self.size_x, self.size_y, self.size_z], dtype=float)

    def contains(self, p: Point3) -> bool:
        return (
            0.0 <= p.x <= self.size_x
            and 0.0 <= p.y <= self.size_y
            and 0.0 <= p.z <= self.size_z
        )


class ChainDrive(_Frozen):
    """A ceiling-mounted rigid-chain drive; lengths in m, forces in N, angles in rad."""
    anchor: Point3
    length_min: float
    length_max: float
    stored_length: float
    pitch: float
    resolution: float
    speed_max: float
    accel_max: float
    error_coefficient: float = 2.0e-4
    tension_limit: float
    compression_limit: float
    gimbal_cone_half_angle: float = math.pi / 2


class Platform(_Frozen):
    # World-frame offsets from the reference point to each gimbal centre
    attachment_offsets: Tuple[Point3, ...]
    mass: float
    payload_mass: float = 0.0

    @property
    def total_mass(self) -> float:
        return self.mass + self.payload_mass


class Scene(_Frozen):
    room: Room
    drives: Tuple[ChainDrive, ...]
    platform: Platform
    gravity: float = 9.80665
    clearance: float = 0.05

    @property
    def n_drives(self) -> int:
        return len(self.drives)

    @property
    def weight(self) -> float:
        """Magnitude of the platform + payload weight (N)."""
        return self.platform.total_mass * self.gravity

    def anchors(self) -> np.ndarray:
        return np.array([d.anchor.array() for d in self.drives])

    def offsets(self) -> np.ndarray:
        return np.array([r.array() for r in self.platform.attachment_offsets])

    def effective_anchors(self) -> np.ndarray:
        """a_i' = a_i - r_i: the sphere centres the reference point lives on."""
        return self.anchors() - self.offsets()


class ChainLengths(_Frozen):
    values: Tuple[float, ...]

    @classmethod
    def of(cls, values: Sequence[float]) -> "ChainLengths":
        return cls(values=tuple(float(v) for v in values))

    def array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def __len__(self) -> int:
        return len(self.values)


class Pose(_Frozen):
    """Platform reference-point position; orientation is fixed."""
    position: Point3

    @classmethod
    def at(cls, x: float, y: float, z: float) -> "Pose":
        return cls(position=Point3(x=float(x), y=float(y), z=float(z)))

    @classmethod
    def of(cls, values: Sequence[float]) -> "Pose":
        return cls(position=Point3.of(values))

    def array(self) -> np.ndarray:
        return self.position.array()
