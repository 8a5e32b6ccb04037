"""Two-mirror calibration map and the synthetic system distortion it corrects."""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.models.arrays import FloatArray
from app.models.signal import ObjectSpec


DEFAULT_GUARD = 16
MIN_MIRROR_SEPARATION = 8.0  # bins


class CalibrationMap(BaseModel):
    """Spectrometer resampling positions plus the interferometer compensation phase.

    ``resample_positions[k]`` is the fractional detector pixel that becomes output sample ``k``;
    ``residual_phase`` is removed after resampling.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    resample_positions: FloatArray
    residual_phase: FloatArray
    guard: int = Field(default=DEFAULT_GUARD, ge=0)

    @model_validator(mode="after")
    def validate_positions(self) -> "CalibrationMap":
        positions = self.resample_positions
        n = positions.shape[0]
        if positions.ndim != 1 or self.residual_phase.shape != positions.shape:
            msg = (
                f"positions {positions.shape} and residual phase {self.residual_phase.shape} "
                "must be equal-length vectors"
            )
            raise ValueError(msg)
        if not np.all(np.isfinite(positions)) or not np.all(np.isfinite(self.residual_phase)):
            msg = "calibration vectors must be finite"
            raise ValueError(msg)
        if np.any(np.diff(positions) <= 0):
            msg = "resample_positions must be strictly increasing"
            raise ValueError(msg)
        if positions[0] < 0 or positions[-1] > n - 1:
            msg = f"resample_positions must lie within [0, {n - 1}]"
            raise ValueError(msg)
        return self

    @property
    def n_samples(self) -> int:
        return int(self.resample_positions.shape[0])

    @classmethod
    def identity(cls, n_samples: int, guard: int = DEFAULT_GUARD) -> "CalibrationMap":
        return cls(
            resample_positions=np.arange(n_samples, dtype=np.float64),
            residual_phase=np.zeros(n_samples),
            guard=guard,
        )


class SystemDistortion(BaseModel):
    """Instrument nonlinearity shared by every measured line.

    The depth-proportional part (``*_per_bin * freq``) models a nonlinear pixel-to-wavenumber
    mapping; ``dispersion_*`` is the depth-independent interferometer phase.
    """

    model_config = ConfigDict(frozen=True)

    a2_per_bin: float = Field(default=0.0, allow_inf_nan=False)
    a3_per_bin: float = Field(default=0.0, allow_inf_nan=False)
    dispersion_a2: float = Field(default=0.0, allow_inf_nan=False)
    dispersion_a3: float = Field(default=0.0, allow_inf_nan=False)

    @property
    def is_zero(self) -> bool:
        return not any(
            (self.a2_per_bin, self.a3_per_bin, self.dispersion_a2, self.dispersion_a3),
        )

    def coefficients(self, freq: float) -> tuple[float, float]:
        """System (a2, a3) seen by an interface at ``freq``."""
        return (
            self.a2_per_bin * freq + self.dispersion_a2,
            self.a3_per_bin * freq + self.dispersion_a3,
        )

    def apply(self, obj: ObjectSpec) -> ObjectSpec:
        """Add the system nonlinearity on top of each interface's own coefficients."""
        interfaces = []
        for interface in obj.interfaces:
            a2, a3 = self.coefficients(interface.freq)
            interfaces.append(
                interface.model_copy(update={"a2": interface.a2 + a2, "a3": interface.a3 + a3}),
            )
        return ObjectSpec(interfaces=interfaces)
