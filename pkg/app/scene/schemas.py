from typing import Annotated, List, Optional

from pydantic import BaseModel, ConfigDict, Field

# [x, y, z] in meters
Vector3 = Annotated[List[float], Field(min_length=3, max_length=3)]


class _StrictSchema(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=True)


class RoomIn(_StrictSchema):
    """Room box [0,size_x]×[0,size_y]×[0,size_z], z up."""
    size_x: float
    size_y: float
    size_z: float


class DriveIn(_StrictSchema):
    """One chain drive as written in the scene file."""
    anchor: Vector3
    length_min: float
    length_max: float
    stored_length: float
    pitch: float
    resolution: float
    speed_max: float
    accel_max: float
    error_coefficient: float = Field(default=2.0e-4, description="Joint-play error per meter of chain")
    tension_limit: float
    # Defaults to 0.25 × tension_limit when absent
    compression_limit: Optional[float] = None
    gimbal_cone_half_angle: Optional[float] = Field(default=None, description="Radians; absent means π/2")


class PlatformIn(_StrictSchema):
    attachment_offsets: List[Vector3]
    mass: float
    payload_mass: float = 0.0


class SceneDocument(_StrictSchema):
    """Top-level scene file. Unknown keys are rejected."""
    room: RoomIn
    gravity: float = 9.80665
    clearance: float = 0.05
    platform: PlatformIn
    drives: List[DriveIn]
