"""gen-dataset."""

from pathlib import Path
from typing import ClassVar

from pydantic import Field

from app.commands.base import Command, emit
from app.models.dataset import (
    DEFAULT_TRAIN_COUNT,
    MIN_DATASET_INTERFACES,
    DatasetConfig,
)
from app.models.signal import MAX_INTERFACES, Grid, Order
from app.models.stack import DEFAULT_A2_MAX, DEFAULT_A3_MAX, DEFAULT_ROWS
from app.services.dataset_service import generate


class GenDatasetCommand(Command):
    """Generate a seeded NLDS dataset file plus its JSON manifest."""

    command_name: ClassVar[str] = "gen-dataset"

    out: Path | None = Field(default=None, description="Dataset file to write")
    count: int = Field(default=DEFAULT_TRAIN_COUNT, gt=0)
    order: Order = 2
    seed: int = Field(default=0, ge=0)
    grid: Grid = Field(default_factory=Grid)
    rows: int = Field(default=DEFAULT_ROWS, ge=2)
    ladder_max: float | None = Field(default=None, gt=0)
    a2_bound: float = Field(default=DEFAULT_A2_MAX, ge=0)
    a3_bound: float = Field(default=DEFAULT_A3_MAX, ge=0)
    interface_range: tuple[int, int] = (MIN_DATASET_INTERFACES, MAX_INTERFACES)
    reflectivity_range: tuple[float, float] = (0.0, 1.0)
    uniform_allocation: bool = True
    workers: int | None = Field(default=None, ge=1, description="Worker processes")

    def dataset_config(self) -> DatasetConfig:
        return DatasetConfig(
            count=self.count,
            order=self.order,
            seed=self.seed,
            grid=self.grid,
            interface_range=self.interface_range,
            reflectivity_range=self.reflectivity_range,
            a2_bound=self.a2_bound,
            a3_bound=self.a3_bound,
            rows=self.rows,
            ladder_max=self.ladder_max,
            uniform_allocation=self.uniform_allocation,
        )

    def run(self) -> None:
        out: Path = self.required("out")
        manifest = generate(self.dataset_config(), out, workers=self.worker_count(self.workers))
        self.write_snapshot(out)
        buckets = ", ".join(f"{j}:{n}" for j, n in sorted(manifest.bucket_counts.items()))
        emit(f"dataset: {out} ({manifest.count} samples, order {manifest.order}; {buckets})")
