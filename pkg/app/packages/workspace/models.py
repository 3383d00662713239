from typing import Dict, List, NamedTuple, Optional, Tuple

from pydantic import BaseModel, ConfigDict

# Evaluation order of is_reachable; coverage attributes a cell to the first hit
CONSTRAINTS: Tuple[str, ...] = (
    "outside-room",
    "above-anchor-plane",
    "length-bounds",
    "gimbal-cone",
    "chain-clearance",
    "force-limits",
    "singular-geometry",
)

GRID_CONVENTION = "cell-center"


class Reachability(BaseModel):
    model_config = ConfigDict(frozen=True)

    reachable: bool
    violations: Tuple[str, ...] = ()


class CellVerdict(NamedTuple):
    ix: int
    iy: int
    iz: int
    cx: float
    cy: float
    cz: float
    reachable: bool
    first_violation: Optional[str]


class CoverageReport(BaseModel):
    grid_dims: Tuple[int, int, int]
    cells_total: int
    cells_reachable: int
    fraction: float
    rejection_histogram: Dict[str, int]
    convention: str = GRID_CONVENTION
    # Row-major (ix, iy, iz) order; only filled when requested
    cells: Optional[List[CellVerdict]] = None


class SegmentCheck(BaseModel):
    model_config = ConfigDict(frozen=True)

    reachable: bool
    # Path parameter (m from start) of the first failing sample
    s: Optional[float] = None
    violations: Tuple[str, ...] = ()
