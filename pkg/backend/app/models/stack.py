"""Compensation ladders and amplitude stacks."""

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from app.models.arrays import FloatArray
from app.models.signal import Order


DEFAULT_ROWS = 32
DEFAULT_A2_MAX = 60.0
DEFAULT_A3_MAX = 30.0


def default_ladder_max(order: Order) -> float:
    return DEFAULT_A2_MAX if order == 2 else DEFAULT_A3_MAX


class CoeffLadder(BaseModel):
    """Symmetric, equally spaced compensation coefficients in radians."""

    model_config = ConfigDict(frozen=True)

    order: Order
    maximum: float = Field(gt=0, allow_inf_nan=False)
    size: int = Field(default=DEFAULT_ROWS, ge=2)

    @classmethod
    def default(cls, order: Order, size: int = DEFAULT_ROWS) -> "CoeffLadder":
        return cls(order=order, maximum=default_ladder_max(order), size=size)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def values(self) -> list[float]:
        """``maximum * (2m/(M-1) - 1)`` for m = 0..M-1."""
        return self.as_array().tolist()

    def as_array(self) -> NDArray[np.float64]:
        m = np.arange(self.size, dtype=np.float64)
        return self.maximum * (2.0 * m / (self.size - 1) - 1.0)

    def nearest_row(self, coeff: float) -> int:
        """Row whose coefficient is closest to ``coeff`` (ties go to the smaller index)."""
        return int(np.argmin(np.abs(self.as_array() - coeff)))


class Stack(BaseModel):
    """M rows of FFT amplitudes, row m compensated with ladder coefficient m."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    rows: FloatArray
    ladder: CoeffLadder
    normalized: bool = False

    @model_validator(mode="after")
    def validate_shape(self) -> "Stack":
        if self.rows.ndim != 2 or self.rows.shape[0] != self.ladder.size:
            msg = f"stack rows have shape {self.rows.shape}, ladder has {self.ladder.size} rows"
            raise ValueError(msg)
        if self.normalized and (self.rows.min() != 0.0 or self.rows.max() != 1.0):
            msg = "normalized stack must span exactly [0, 1]"
            raise ValueError(msg)
        return self

    @property
    def shape(self) -> tuple[int, int]:
        return int(self.rows.shape[0]), int(self.rows.shape[1])
