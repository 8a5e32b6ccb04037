"""Object and signal data models for synthetic interferograms."""

from typing import Literal

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.models.arrays import FloatArray


MAX_INTERFACES = 12
MIN_PEAK_SEPARATION = 4.0  # bins
F_MIN = 8.0
EDGE_MARGIN = 32.0  # bins kept free below Nyquist

Order = Literal[2, 3]


class Grid(BaseModel):
    """Sampling grid of a raw signal.

    Sample ``n`` sits at the centered coordinate ``u = (n - N/2)/N`` in [-1/2, 1/2); the band
    coordinate used by the phase polynomials is ``v = 2u`` in [-1, 1).
    """

    model_config = ConfigDict(frozen=True)

    n_samples: int = Field(default=1024, ge=8)
    envelope_sigma: float = Field(default=0.15, gt=0, allow_inf_nan=False)

    @field_validator("n_samples")
    @classmethod
    def validate_power_of_two(cls, v: int) -> int:
        """FFT path is radix-2."""
        if v & (v - 1):
            msg = f"n_samples must be a power of two, got {v}"
            raise ValueError(msg)
        return v

    @property
    def f_min(self) -> float:
        return F_MIN

    @property
    def f_max(self) -> float:
        return self.n_samples / 2 - EDGE_MARGIN

    def centered(self) -> NDArray[np.float64]:
        """Centered coordinate u of every sample."""
        n = self.n_samples
        return (np.arange(n, dtype=np.float64) - n // 2) / n

    def band(self) -> NDArray[np.float64]:
        """Band coordinate v = 2u of every sample."""
        return 2.0 * self.centered()

    def envelope(self) -> NDArray[np.float64]:
        """Gaussian synthesis envelope, exactly 1 at the center sample."""
        u = self.centered()
        return np.exp(-(u**2) / (2.0 * self.envelope_sigma**2))


class Interface(BaseModel):
    """One reflecting interface of an imaged object.

    ``a2`` and ``a3`` are the quadratic and cubic phase (radians) reached at the band edge.
    """

    model_config = ConfigDict(frozen=True)

    freq: float = Field(allow_inf_nan=False)
    reflectivity: float = Field(gt=0, le=1, allow_inf_nan=False)
    a2: float = Field(default=0.0, allow_inf_nan=False)
    a3: float = Field(default=0.0, allow_inf_nan=False)
    phase: float = Field(default=0.0, allow_inf_nan=False)


class ObjectSpec(BaseModel):
    """An imaged object: an ordered list of interfaces."""

    model_config = ConfigDict(frozen=True)

    interfaces: list[Interface] = Field(min_length=1, max_length=MAX_INTERFACES)

    @model_validator(mode="after")
    def validate_separation(self) -> "ObjectSpec":
        """Peaks closer than the minimum separation merge in the ground truth."""
        freqs = sorted(i.freq for i in self.interfaces)
        for left, right in zip(freqs, freqs[1:], strict=False):
            if right - left < MIN_PEAK_SEPARATION:
                msg = (
                    f"interface frequencies {left} and {right} are closer than "
                    f"{MIN_PEAK_SEPARATION} bins"
                )
                raise ValueError(msg)
        return self

    @property
    def total_reflectivity(self) -> float:
        return float(sum(i.reflectivity for i in self.interfaces))

    def with_order_removed(self, order: Order) -> "ObjectSpec":
        """Copy with the given nonlinearity order zeroed on every interface."""
        field = "a2" if order == 2 else "a3"
        return ObjectSpec(
            interfaces=[i.model_copy(update={field: 0.0}) for i in self.interfaces],
        )


class RawSignal(BaseModel):
    """Sampled real-valued interferogram on a grid."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    samples: FloatArray
    grid: Grid

    @model_validator(mode="after")
    def validate_length(self) -> "RawSignal":
        if self.samples.shape != (self.grid.n_samples,):
            msg = (
                f"signal has shape {self.samples.shape}, "
                f"grid expects ({self.grid.n_samples},)"
            )
            raise ValueError(msg)
        return self
