"""train, infer, eval and bench."""

import logging
import time
from pathlib import Path
from typing import ClassVar, Literal

import numpy as np
from pydantic import BaseModel, Field

from app.commands.base import Command, emit
from app.errors import ConfigurationError, ShapeMismatchError
from app.models.dataset import DatasetConfig, DatasetHeader
from app.models.network import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_EPOCHS,
    DEFAULT_LEARNING_RATE,
    DEFAULT_THRESHOLDS,
    NetConfig,
    NetworkState,
    OutputActivation,
    TrainConfig,
)
from app.models.signal import Grid, Order
from app.nn.trainer import TrainingData, train
from app.nn.unet import init_state, predict
from app.nn.weights import load_weights, save_weights
from app.services.dataset_service import draw_object, read_arrays
from app.services.evaluation_service import evaluate, write_report_csv, write_report_json
from app.services.experiment_service import network_ladder, pipeline_for, process_lines
from app.services.signal_model import synthesize_signal
from app.services.stack_builder import build_stack, normalize_stack
from app.utils.export import read_lines_csv, write_csv
from app.utils.prng import sample_rng


logger = logging.getLogger(__name__)

Preset = Literal["full", "toy"]


def preset_config(preset: Preset) -> NetConfig:
    return NetConfig.full() if preset == "full" else NetConfig.toy()


def _load_split(path: Path) -> tuple[DatasetHeader, TrainingData]:
    header, inputs, targets, _ = read_arrays(path)
    return header, TrainingData(inputs=inputs, targets=targets, order=header.order)


class TrainCommand(Command):
    """Train one network on a dataset, keeping the best validation epoch."""

    command_name: ClassVar[str] = "train"

    train_set: Path | None = Field(default=None, description="Training dataset (NLDS)")
    val_set: Path | None = Field(default=None, description="Validation dataset (NLDS)")
    out: Path | None = Field(default=None, description="Weight file to write (NLNW)")
    report: Path | None = Field(
        default=None,
        description="TrainReport JSON (default: <out stem>.report.json)",
    )
    resume: Path | None = Field(default=None, description="Start from these weights")
    preset: Preset = "full"
    levels: int | None = Field(default=None, ge=1)
    base_channels: int | None = Field(default=None, ge=1)
    output_activation: OutputActivation = "sigmoid"
    init_seed: int = Field(default=0, ge=0)
    epochs: int = Field(default=DEFAULT_EPOCHS, ge=0)
    batch_size: int = Field(default=DEFAULT_BATCH_SIZE, ge=1)
    learning_rate: float = Field(default=DEFAULT_LEARNING_RATE, gt=0)
    seed: int = Field(default=0, ge=0, description="Shuffling seed")
    thresholds: tuple[float, ...] = DEFAULT_THRESHOLDS
    primary_threshold: float = DEFAULT_THRESHOLDS[0]

    def net_config(self, header: DatasetHeader) -> NetConfig:
        """Preset with explicit overrides, sized to the dataset's stacks."""
        values = preset_config(self.preset).model_dump()
        values.update(rows=header.rows, width=header.n_samples, ladder_max=header.ladder_values[-1])
        values["output_activation"] = self.output_activation
        if self.levels is not None:
            values["levels"] = self.levels
        if self.base_channels is not None:
            values["base_channels"] = self.base_channels
        return NetConfig.model_validate(values)

    def initial_state(self, header: DatasetHeader) -> NetworkState:
        if self.resume is None:
            return init_state(self.net_config(header), header.order, seed=self.init_seed)
        state = load_weights(self.resume)
        if (state.config.rows, state.config.width) != (header.rows, header.n_samples):
            msg = (
                f"resumed network expects {state.config.rows} x {state.config.width} stacks, "
                f"dataset holds {header.rows} x {header.n_samples}"
            )
            raise ShapeMismatchError(msg)
        trained = header.ladder_values[-1]
        if state.config.ladder_max is not None and not np.isclose(state.config.ladder_max, trained):
            logger.warning(
                "Resumed network was trained on ladder maximum %g, dataset uses %g",
                state.config.ladder_max,
                trained,
            )
        state.config = state.config.model_copy(update={"ladder_max": trained})
        return state

    def run(self) -> None:
        out: Path = self.required("out")
        train_header, train_set = _load_split(self.required("train_set"))
        _, val_set = _load_split(self.required("val_set"))
        config = TrainConfig(
            epochs=self.epochs,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            seed=self.seed,
            thresholds=self.thresholds,
            primary_threshold=self.primary_threshold,
        )
        best, report = train(self.initial_state(train_header), train_set, val_set, config)
        save_weights(best, out)
        report_path = self.report or out.with_name(f"{out.stem}.report.json")
        report_path.parent.mkdir(parents=True, exist_ok=True)
        report_path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
        self.write_snapshot(out)
        if report.best_epoch is None:
            emit(f"weights: {out} (no epochs run)")
            return
        best_record = report.epochs[report.best_epoch]
        gof_text = ", ".join(f"GoF@{k} {v:.2f}%" for k, v in best_record.val_gof.items())
        emit(
            f"weights: {out} (best epoch {report.best_epoch + 1}/{len(report.epochs)}, "
            f"val MAE {best_record.val_mae:.5f}, {gof_text})",
        )


class InferCommand(Command):
    """Network output for raw lines or for every sample of a dataset."""

    command_name: ClassVar[str] = "infer"

    weights: Path | None = Field(default=None, description="Weight file (NLNW)")
    signals: Path | None = Field(default=None, description="CSV of raw lines, one per row")
    dataset: Path | None = Field(default=None, description="Dataset whose stacks to run")
    out: Path | None = Field(default=None, description="Output CSV, one line per row")
    ladder_max: float | None = Field(default=None, gt=0)
    envelope_sigma: float | None = Field(default=None, gt=0)
    batch_size: int = Field(default=DEFAULT_BATCH_SIZE, ge=1)

    def run(self) -> None:
        out: Path = self.required("out")
        state = load_weights(self.required("weights"))
        if (self.signals is None) == (self.dataset is None):
            msg = "infer: give exactly one of --signals or --dataset"
            raise ConfigurationError(msg)
        if self.dataset is not None:
            header, inputs, _, _ = read_arrays(self.dataset)
            if header.order != state.order:
                logger.warning(
                    "Order-%d network run on an order-%d dataset",
                    state.order,
                    header.order,
                )
            outputs = predict(state, inputs, batch_size=self.batch_size)
        else:
            lines = read_lines_csv(self.required("signals"), self.envelope_sigma)
            outputs = process_lines(
                lines,
                pipeline_for(state),
                net=state,
                ladder=network_ladder(state, self.ladder_max),
            )
        write_csv(out, outputs)
        self.write_snapshot(out)
        emit(f"output: {out} ({outputs.shape[0]} lines)")


class EvalCommand(Command):
    """Per-interface-count GoF breakdown of a network on a dataset."""

    command_name: ClassVar[str] = "eval"

    weights: Path | None = Field(default=None, description="Weight file (NLNW)")
    dataset: Path | None = Field(default=None, description="Test dataset (NLDS)")
    out: Path | None = Field(default=None, description="Report CSV")
    json_out: Path | None = Field(default=None, description="Report JSON (default: <out>.json)")
    threshold: list[float] = Field(
        default_factory=lambda: [0.001],
        description="GoF thresholds; the first one drives the table",
    )
    allow_order_mismatch: bool = False
    batch_size: int = Field(default=DEFAULT_BATCH_SIZE, ge=1)

    def run(self) -> None:
        out: Path = self.required("out")
        state = load_weights(self.required("weights"))
        report = evaluate(
            state,
            self.required("dataset"),
            self.threshold,
            allow_order_mismatch=self.allow_order_mismatch,
            batch_size=self.batch_size,
        )
        write_report_csv(report, out)
        json_out = self.json_out or out.with_suffix(".json")
        write_report_json(report, json_out)
        self.write_snapshot(out)

        table = report.primary
        lines = [f"GoF threshold {table.threshold:g}", "interfaces  below95  size  percent"]
        lines.extend(
            f"{b.interface_count:>10}  {b.below_95:>7}  {b.size:>4}  {b.percent_below:>6.2f}"
            for b in table.buckets
            if b.size
        )
        lines.append(
            f"{'total':>10}  {table.total_below_95:>7}  {table.total_size:>4}  "
            f"{table.total_percent_below:>6.2f}",
        )
        lines.append(f"mean GoF {table.mean_gof:.3f}%")
        lines.extend(f"warning: {w}" for w in report.warnings)
        emit("\n".join(lines))


class BenchResult(BaseModel):
    stacks: int
    n_samples: int
    rows: int
    stacks_per_second: float
    inference_ms_per_stack: float


class BenchCommand(Command):
    """Stack-building throughput and inference latency; reported, not asserted."""

    command_name: ClassVar[str] = "bench"

    weights: Path | None = Field(default=None, description="Weights to time (default: random)")
    preset: Preset = "toy"
    order: Order = 2
    count: int = Field(default=16, ge=1)
    repeats: int = Field(default=3, ge=1)
    seed: int = Field(default=0, ge=0)

    def run(self) -> None:
        state = (
            load_weights(self.weights)
            if self.weights is not None
            else init_state(preset_config(self.preset), self.order, seed=self.seed)
        )
        cfg = state.config
        dataset_cfg = DatasetConfig(
            count=max(self.count, 11),
            order=state.order,
            seed=self.seed,
            grid=Grid(n_samples=cfg.width),
            rows=cfg.rows,
        )
        signals = [
            synthesize_signal(
                draw_object(sample_rng(self.seed, i), dataset_cfg, 2 + i % 11),
                dataset_cfg.grid,
            )
            for i in range(self.count)
        ]
        ladder = network_ladder(state)

        best_build = float("inf")
        best_infer = float("inf")
        for _ in range(self.repeats):
            started = time.perf_counter()
            stacks = np.stack([normalize_stack(build_stack(s, ladder)).rows for s in signals])
            best_build = min(best_build, time.perf_counter() - started)
            started = time.perf_counter()
            predict(state, stacks[:, None, :, :].astype(cfg.dtype))
            best_infer = min(best_infer, time.perf_counter() - started)

        result = BenchResult(
            stacks=self.count,
            n_samples=cfg.width,
            rows=cfg.rows,
            stacks_per_second=self.count / best_build if best_build > 0 else float("inf"),
            inference_ms_per_stack=1000.0 * best_infer / self.count,
        )
        emit(result.model_dump_json(indent=2))
