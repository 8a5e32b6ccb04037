"""simulate, stack and demo."""

import logging
from pathlib import Path
from typing import ClassVar

import numpy as np
from pydantic import Field

from app.commands.base import Command, emit
from app.errors import DataError
from app.models.calibration import SystemDistortion
from app.models.signal import Grid, Order
from app.models.stack import DEFAULT_ROWS, CoeffLadder, default_ladder_max
from app.services.signal_model import (
    add_noise,
    demo_effects,
    read_object,
    synthesize_signal,
)
from app.services.stack_builder import build_stack, normalize_stack
from app.utils.export import read_lines_csv, write_csv, write_named_vectors, write_pgm
from app.utils.prng import run_rng
from app.utils.spectral import fft_amplitude


logger = logging.getLogger(__name__)


class SimulateCommand(Command):
    """Synthesize the raw signal of an object and its FFT amplitude."""

    command_name: ClassVar[str] = "simulate"

    object_json: Path | None = Field(default=None, description="ObjectSpec JSON document")
    out: Path | None = Field(default=None, description="Signal CSV, one sample per row")
    amplitude_out: Path | None = Field(
        default=None,
        description="Amplitude CSV (default: <out stem>.amplitude.csv)",
    )
    grid: Grid = Field(default_factory=Grid)
    system: SystemDistortion = Field(
        default_factory=SystemDistortion,
        description="System nonlinearity added on top of the object's own",
    )
    noise_rms: float = Field(default=0.0, ge=0)
    seed: int = Field(default=0, ge=0)

    def run(self) -> None:
        out: Path = self.required("out")
        obj = read_object(self.required("object_json"))
        signal = synthesize_signal(self.system.apply(obj), self.grid)
        signal = add_noise(signal, self.noise_rms, run_rng(self.seed))
        amplitude_out = self.amplitude_out or out.with_name(f"{out.stem}.amplitude.csv")
        write_csv(out, signal.samples)
        write_csv(amplitude_out, fft_amplitude(signal.samples))
        self.write_snapshot(out)
        emit(f"signal: {out}\namplitude: {amplitude_out}")


class StackCommand(Command):
    """Compensation stack of one raw signal."""

    command_name: ClassVar[str] = "stack"

    signal: Path | None = Field(default=None, description="Signal CSV (one line)")
    out: Path | None = Field(default=None, description="Stack CSV, one ladder row per line")
    preview: Path | None = Field(default=None, description="Optional PGM preview of the stack")
    order: Order = 2
    rows: int = Field(default=DEFAULT_ROWS, ge=2)
    ladder_max: float | None = Field(default=None, gt=0)
    envelope_sigma: float | None = Field(default=None, gt=0)
    normalize: bool = True

    def run(self) -> None:
        out: Path = self.required("out")
        signals = read_lines_csv(self.required("signal"), self.envelope_sigma)
        if len(signals) != 1:
            msg = f"stack needs exactly one line, {self.signal} holds {len(signals)}"
            raise DataError(msg)
        ladder = CoeffLadder(
            order=self.order,
            maximum=self.ladder_max or default_ladder_max(self.order),
            size=self.rows,
        )
        stack = build_stack(signals[0], ladder)
        if self.normalize:
            stack = normalize_stack(stack)
        write_csv(out, stack.rows)
        if self.preview is not None:
            write_pgm(self.preview, stack.rows)
        self.write_snapshot(out)
        emit(f"stack: {out} ({stack.shape[0]} x {stack.shape[1]})")


class DemoCommand(Command):
    """Raw signals and amplitudes of one interface under each nonlinearity order."""

    command_name: ClassVar[str] = "demo"

    out: Path | None = Field(default=None, description="CSV with one column per variant")
    grid: Grid = Field(default_factory=Grid)
    freq: float = 200.0
    a2: float = 40.0
    a3: float = 15.0

    def run(self) -> None:
        out: Path = self.required("out")
        variants = demo_effects(self.grid, self.freq, self.a2, self.a3)
        columns: dict[str, np.ndarray] = {}
        for name, signal in variants.items():
            columns[f"{name}_signal"] = signal.samples
        for name, signal in variants.items():
            columns[f"{name}_amplitude"] = fft_amplitude(signal.samples)
        write_named_vectors(out, columns)
        self.write_snapshot(out)
        emit(f"demo: {out} ({', '.join(variants)})")
