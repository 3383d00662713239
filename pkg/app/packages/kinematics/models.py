from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict


class Jacobian(BaseModel):
    """Row i is dL_i/dp, the unit vector from anchor i to attachment i."""

    model_config = ConfigDict(frozen=True)

    rows: Tuple[Tuple[float, float, float], ...]

    @classmethod
    def of(cls, matrix: np.ndarray) -> "Jacobian":
        return cls(rows=tuple(tuple(float(v) for v in row) for row in matrix))

    def array(self) -> np.ndarray:
        return np.array(self.rows, dtype=float)
