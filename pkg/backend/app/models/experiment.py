"""Mirror-study tables, B-scans and pipeline selection."""

from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.models.arrays import FloatArray
from app.models.calibration import SystemDistortion
from app.models.signal import Grid


Pipeline = Literal["raw", "net1", "net2", "baseline"]
PIPELINES: tuple[Pipeline, ...] = ("raw", "net1", "net2", "baseline")

DEFAULT_MIRROR_DEPTHS: tuple[float, ...] = tuple(np.linspace(40.0, 440.0, 11).tolist())

# Common system nonlinearity of the desk-scale mirror study: 40 rad quadratic and 15 rad cubic
# phase at a mirror depth of 200 bins, of which 20 rad quadratic is depth-independent dispersion.
DEFAULT_SYSTEM = SystemDistortion(a2_per_bin=0.1, a3_per_bin=15.0 / 400.0, dispersion_a2=20.0)


class PeakMetrics(BaseModel):
    """Shape of the dominant positive-frequency peak of one pipeline output.

    ``fwhm`` and ``asymmetry`` are NaN when a half-maximum crossing is missing;
    ``peak_fraction`` is the peak amplitude over the summed positive-half amplitude.
    """

    model_config = ConfigDict(frozen=True)

    peak_bin: int
    fwhm: float
    asymmetry: float
    peak_fraction: float


class MirrorRow(BaseModel):
    """All pipelines applied to one mirror depth; absent pipelines are None."""

    model_config = ConfigDict(frozen=True)

    depth: float
    raw: PeakMetrics
    net1: PeakMetrics | None = None
    net2: PeakMetrics | None = None
    baseline: PeakMetrics | None = None


class MirrorStudyResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    grid: Grid
    system: SystemDistortion
    calibration_depths: tuple[float, float] | None = None
    transform_limit: float
    rows: list[MirrorRow] = Field(min_length=2)

    def column(self, pipeline: Pipeline, metric: str) -> list[float]:
        """One metric of one pipeline down the depth column (NaN where the pipeline is absent)."""
        values = []
        for row in self.rows:
            metrics: PeakMetrics | None = getattr(row, pipeline)
            values.append(float("nan") if metrics is None else float(getattr(metrics, metric)))
        return values


class BScan(BaseModel):
    """Lines x n_samples image, one FFT-amplitude line per lateral position."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    lines: FloatArray
    grid: Grid
    pipeline: Pipeline

    @model_validator(mode="after")
    def validate_shape(self) -> "BScan":
        if self.lines.ndim != 2 or self.lines.shape[1] != self.grid.n_samples:
            msg = f"B-scan lines {self.lines.shape} do not match n_samples={self.grid.n_samples}"
            raise ValueError(msg)
        return self

    @property
    def shape(self) -> tuple[int, int]:
        return int(self.lines.shape[0]), int(self.lines.shape[1])


class DispersionRow(BaseModel):
    """Single interface carrying its own quadratic phase on top of the system's."""

    model_config = ConfigDict(frozen=True)

    object_a2: float
    raw: PeakMetrics
    baseline: PeakMetrics
    net1: PeakMetrics | None = None
