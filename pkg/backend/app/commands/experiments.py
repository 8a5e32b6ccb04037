"""mirror-study, dispersion and bscan."""

import logging
from pathlib import Path
from typing import ClassVar, Literal

import numpy as np
from pydantic import Field

from app.commands.base import Command, emit
from app.errors import ConfigurationError
from app.models.calibration import DEFAULT_GUARD, CalibrationMap, SystemDistortion
from app.models.experiment import DEFAULT_MIRROR_DEPTHS, DEFAULT_SYSTEM, Pipeline
from app.models.network import NetworkState
from app.models.signal import Grid, RawSignal
from app.models.stack import CoeffLadder
from app.nn.weights import load_weights
from app.services.baseline_service import calibrate_system, read_calibration
from app.services.experiment_service import (
    assemble_bscan,
    default_calibration_depths,
    dispersion_comparison,
    mirror_study,
    network_ladder,
)
from app.services.phantoms import glass_phantom, layered_phantom
from app.utils.export import (
    read_lines_csv,
    write_bscan,
    write_dispersion_rows,
    write_mirror_study,
)


logger = logging.getLogger(__name__)


def _optional_net(path: Path | None) -> NetworkState | None:
    return load_weights(path) if path is not None else None


def _ladder(net: NetworkState | None, maximum: float | None) -> CoeffLadder | None:
    return network_ladder(net, maximum) if net is not None else None


class MirrorStudyCommand(Command):
    """Mirrors at several depths through the raw, network and baseline pipelines."""

    command_name: ClassVar[str] = "mirror-study"

    depths: list[float] = Field(default_factory=lambda: list(DEFAULT_MIRROR_DEPTHS))
    system: SystemDistortion = Field(default=DEFAULT_SYSTEM)
    grid: Grid = Field(default_factory=Grid)
    net1: Path | None = Field(default=None, description="Order-2 network weights")
    net2: Path | None = Field(default=None, description="Order-3 network weights")
    net1_ladder_max: float | None = Field(default=None, gt=0)
    net2_ladder_max: float | None = Field(default=None, gt=0)
    calibration: Path | None = Field(
        default=None,
        description="Calibration JSON (default: built from the first and middle depths)",
    )
    guard: int = Field(default=DEFAULT_GUARD, ge=0)
    out: Path | None = Field(default=None, description="Result CSV, one row per depth")

    def run(self) -> None:
        out: Path = self.required("out")
        net1 = _optional_net(self.net1)
        net2 = _optional_net(self.net2)
        ladders: dict[Pipeline, CoeffLadder] = {}
        if net1 is not None:
            ladders["net1"] = network_ladder(net1, self.net1_ladder_max)
        if net2 is not None:
            ladders["net2"] = network_ladder(net2, self.net2_ladder_max)
        calibration = read_calibration(self.calibration) if self.calibration else None
        result = mirror_study(
            self.depths,
            self.system,
            net1,
            net2,
            calibration,
            grid=self.grid,
            ladders=ladders,
            guard=self.guard,
        )
        write_mirror_study(result, out)
        self.write_snapshot(out)

        header = "depth  raw_fwhm  net1_fwhm  net2_asym  base_fwhm"
        rows = [header]
        raw = result.column("raw", "fwhm")
        net1_fwhm = result.column("net1", "fwhm")
        net2_asym = result.column("net2", "asymmetry")
        base = result.column("baseline", "fwhm")
        for i, row in enumerate(result.rows):
            rows.append(
                f"{row.depth:>5.0f}  {raw[i]:>8.2f}  {net1_fwhm[i]:>9.2f}  "
                f"{net2_asym[i]:>9.3f}  {base[i]:>9.2f}",
            )
        rows.append(f"transform limit {result.transform_limit:.3f} bins")
        emit("\n".join(rows))


class DispersionCommand(Command):
    """Object dispersion against a system-only calibration and an order-2 network."""

    command_name: ClassVar[str] = "dispersion"

    object_a2: list[float] = Field(default_factory=lambda: [0.0, 10.0, 20.0, 30.0, 40.0])
    depth: float = 200.0
    system: SystemDistortion = Field(default=DEFAULT_SYSTEM)
    grid: Grid = Field(default_factory=Grid)
    net1: Path | None = Field(default=None, description="Order-2 network weights")
    ladder_max: float | None = Field(default=None, gt=0)
    calibration: Path | None = Field(default=None, description="System calibration JSON")
    out: Path | None = Field(default=None, description="Result CSV, one row per object")

    def run(self) -> None:
        out: Path = self.required("out")
        calibration = (
            read_calibration(self.calibration)
            if self.calibration
            else calibrate_system(self.system, self.grid, default_calibration_depths(self.grid))
        )
        net1 = _optional_net(self.net1)
        rows = dispersion_comparison(
            self.object_a2,
            self.depth,
            calibration,
            self.system,
            net1,
            grid=self.grid,
            ladder=_ladder(net1, self.ladder_max),
        )
        write_dispersion_rows(rows, out)
        self.write_snapshot(out)
        lines = ["object_a2  raw_fwhm  base_fwhm  net1_fwhm"]
        for row in rows:
            net_fwhm = row.net1.fwhm if row.net1 is not None else float("nan")
            lines.append(
                f"{row.object_a2:>9.1f}  {row.raw.fwhm:>8.2f}  {row.baseline.fwhm:>9.2f}  "
                f"{net_fwhm:>9.2f}",
            )
        emit("\n".join(lines))


class BScanCommand(Command):
    """Assemble a B-scan from a phantom or from a CSV of raw lines."""

    command_name: ClassVar[str] = "bscan"

    phantom: Literal["glass", "layered"] = "glass"
    lines_csv: Path | None = Field(default=None, description="Raw lines instead of a phantom")
    lines: int = Field(default=256, ge=1)
    pipeline: Pipeline = "raw"
    net: Path | None = Field(default=None, description="Network weights for net1/net2")
    ladder_max: float | None = Field(default=None, gt=0)
    calibration: Path | None = Field(default=None, description="Calibration for baseline")
    system: SystemDistortion = Field(default=DEFAULT_SYSTEM)
    grid: Grid = Field(default_factory=Grid)
    snr_db: float | None = Field(default=None, description="Phantom noise level")
    seed: int = Field(default=0, ge=0)
    out: Path | None = Field(default=None, description="B-scan CSV, one line per row")
    image: Path | None = Field(default=None, description="PGM image (default: <out stem>.pgm)")

    def signals(self) -> list[RawSignal]:
        if self.lines_csv is not None:
            return read_lines_csv(self.lines_csv, self.grid.envelope_sigma)
        if self.phantom == "glass":
            return glass_phantom(self.grid, self.lines, self.system)
        return layered_phantom(self.grid, self.lines, self.system, self.snr_db, self.seed)

    def calibration_map(self, grid: Grid) -> CalibrationMap | None:
        if self.pipeline != "baseline":
            return None
        if self.calibration is not None:
            return read_calibration(self.calibration)
        return calibrate_system(self.system, grid, default_calibration_depths(grid))

    def run(self) -> None:
        out: Path = self.required("out")
        if self.pipeline in ("net1", "net2") and self.net is None:
            msg = f"bscan: the {self.pipeline} pipeline needs --net"
            raise ConfigurationError(msg)
        signals = self.signals()
        net = _optional_net(self.net)
        bscan = assemble_bscan(
            signals,
            self.pipeline,
            net=net,
            calibration=self.calibration_map(signals[0].grid),
            ladder=_ladder(net, self.ladder_max),
        )
        image = self.image or out.with_suffix(".pgm")
        write_bscan(bscan, out, image)
        self.write_snapshot(out)
        peak = float(np.max(bscan.lines))
        emit(f"bscan: {out} and {image} ({bscan.shape[0]} x {bscan.shape[1]}, max {peak:.4g})")
