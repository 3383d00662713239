from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict


class ForceSolution(BaseModel):
    """Axial chain forces; positive is tension, negative compression (N)."""

    model_config = ConfigDict(frozen=True)

    axial_forces: Tuple[float, ...]
    residual: float
    feasible: bool
    # Remaining capacity per chain against its active limit; negative when exceeded
    margins: Tuple[float, ...]


class ForceCheck(BaseModel):
    model_config = ConfigDict(frozen=True)

    feasible: bool
    chain_index: Optional[int] = None
    excess: float = 0.0
    solution: ForceSolution
