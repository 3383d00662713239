from typing import NamedTuple, Tuple

from pydantic import BaseModel, ConfigDict


class ErrorEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    chain_errors: Tuple[float, ...]
    # Signed first-order position error for chain_errors as given
    position_error: Tuple[float, float, float]
    # Largest |δp| over every sign assignment of chain_errors
    worst_case_norm: float


class ErrorCell(NamedTuple):
    cx: float
    cy: float
    cz: float
    worst_case_error: float
