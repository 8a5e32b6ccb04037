"""calibrate and linearize."""

from pathlib import Path
from typing import ClassVar

from pydantic import Field

from app.commands.base import Command, emit
from app.errors import ConfigurationError, DataError
from app.models.calibration import DEFAULT_GUARD, SystemDistortion
from app.models.experiment import DEFAULT_SYSTEM
from app.models.signal import Grid, RawSignal
from app.services.baseline_service import (
    calibrate,
    calibrate_system,
    linearize,
    read_calibration,
    write_calibration,
)
from app.services.experiment_service import default_calibration_depths
from app.utils.export import read_lines_csv, write_csv


def _single_line(path: Path, envelope_sigma: float | None) -> RawSignal:
    lines = read_lines_csv(path, envelope_sigma)
    if len(lines) != 1:
        msg = f"{path} must hold exactly one mirror line, found {len(lines)}"
        raise DataError(msg)
    return lines[0]


class CalibrateCommand(Command):
    """Two-mirror calibration, from recorded mirror lines or synthetic ones."""

    command_name: ClassVar[str] = "calibrate"

    mirror1: Path | None = Field(default=None, description="First mirror signal CSV")
    mirror2: Path | None = Field(default=None, description="Second mirror signal CSV")
    depths: tuple[float, float] | None = Field(
        default=None,
        description="Synthetic mirror depths in bins when no mirror files are given",
    )
    system: SystemDistortion = Field(default=DEFAULT_SYSTEM)
    grid: Grid = Field(default_factory=Grid)
    guard: int = Field(default=DEFAULT_GUARD, ge=0)
    out: Path | None = Field(default=None, description="Calibration JSON to write")

    def run(self) -> None:
        out: Path = self.required("out")
        if (self.mirror1 is None) != (self.mirror2 is None):
            msg = "calibrate: give both --mirror1 and --mirror2, or neither"
            raise ConfigurationError(msg)
        if self.mirror1 is not None and self.mirror2 is not None:
            sigma = self.grid.envelope_sigma
            first = _single_line(self.mirror1, sigma)
            second = _single_line(self.mirror2, sigma)
            calibration = calibrate(first, second, guard=self.guard)
            source = f"{self.mirror1} and {self.mirror2}"
        else:
            depths = self.depths or default_calibration_depths(self.grid)
            calibration = calibrate_system(self.system, self.grid, depths, guard=self.guard)
            source = f"synthetic mirrors at {depths[0]:g} and {depths[1]:g}"
        write_calibration(calibration, out)
        self.write_snapshot(out)
        emit(f"calibration: {out} ({calibration.n_samples} samples, from {source})")


class LinearizeCommand(Command):
    """Apply a calibration to raw lines."""

    command_name: ClassVar[str] = "linearize"

    signals: Path | None = Field(default=None, description="CSV of raw lines, one per row")
    calibration: Path | None = Field(default=None, description="Calibration JSON")
    envelope_sigma: float | None = Field(default=None, gt=0)
    out: Path | None = Field(default=None, description="Amplitude CSV, one line per row")

    def run(self) -> None:
        out: Path = self.required("out")
        calibration = read_calibration(self.required("calibration"))
        lines = read_lines_csv(self.required("signals"), self.envelope_sigma)
        amplitudes = [linearize(line, calibration) for line in lines]
        write_csv(out, amplitudes[0] if len(amplitudes) == 1 else amplitudes)
        self.write_snapshot(out)
        emit(f"linearized: {out} ({len(amplitudes)} lines)")
