"""Mini-batch training with per-epoch validation and best-state selection."""

import logging
import time
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from telemetry import record_metrics, run_span

from app.errors import (
    DataError,
    NonFiniteError,
    OrderMismatchError,
    ShapeMismatchError,
    TrainingDivergedError,
)
from app.models.network import (
    EpochRecord,
    NetworkState,
    TrainConfig,
    TrainReport,
    threshold_key,
)
from app.models.signal import Order
from app.nn.optim import adam_step
from app.nn.unet import backward, predict
from app.utils.peaks import gof_rows
from app.utils.prng import run_rng


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainingData:
    """Inputs (S, 1, M, N) and targets (S, N) of one dataset split."""

    inputs: NDArray[np.floating]
    targets: NDArray[np.floating]
    order: Order

    def __post_init__(self) -> None:
        if self.inputs.shape[0] != self.targets.shape[0]:
            msg = f"{self.inputs.shape[0]} inputs but {self.targets.shape[0]} targets"
            raise ShapeMismatchError(msg)

    def __len__(self) -> int:
        return int(self.inputs.shape[0])


def validate(
    state: NetworkState,
    data: TrainingData,
    thresholds: tuple[float, ...],
    batch_size: int,
) -> tuple[float, dict[str, float]]:
    """Validation MAE and mean per-sample GoF at each threshold."""
    pred = predict(state, data.inputs, batch_size=batch_size).astype(np.float64)
    targets = data.targets.astype(np.float64)
    val_mae = float(np.mean(np.abs(pred - targets)))
    gofs = {threshold_key(t): float(np.mean(gof_rows(pred, targets, t))) for t in thresholds}
    return val_mae, gofs


def _check_data(state: NetworkState, train_set: TrainingData, val_set: TrainingData) -> None:
    if len(train_set) == 0:
        msg = "training set is empty"
        raise DataError(msg)
    if len(val_set) == 0:
        msg = "validation set is empty"
        raise DataError(msg)
    for name, data in (("training", train_set), ("validation", val_set)):
        if data.order != state.order:
            msg = f"{name} data is order {data.order}, network removes order {state.order}"
            raise OrderMismatchError(msg)


def train(
    state: NetworkState,
    train_set: TrainingData,
    val_set: TrainingData,
    config: TrainConfig | None = None,
) -> tuple[NetworkState, TrainReport]:
    """Train with Adam on the MAE loss and return the best validation-GoF state.

    Samples are reshuffled every epoch from a generator seeded with ``config.seed``. The
    returned state is a copy taken at the epoch with the highest mean GoF at the primary
    threshold (earliest on ties); ``state`` itself ends at the last epoch.
    """
    config = config or TrainConfig()
    _check_data(state, train_set, val_set)
    report = TrainReport(
        order=state.order,
        primary_threshold=config.primary_threshold,
        thresholds=list(config.thresholds),
        parameter_count=state.parameter_count,
    )
    best_state = state.clone()
    if config.epochs == 0:
        return best_state, report

    rng = run_rng(config.seed)
    primary = threshold_key(config.primary_threshold)
    best_gof = -np.inf
    best_mae = np.inf
    count = len(train_set)

    for epoch in range(config.epochs):
        started = time.perf_counter()
        with run_span("train.epoch", epoch=epoch, order=state.order) as span:
            shuffled = rng.permutation(count)
            loss_sum = 0.0
            for start in range(0, count, config.batch_size):
                batch = shuffled[start : start + config.batch_size]
                where = f"epoch {epoch}, batch starting at {start} (optimizer step {state.step})"
                try:
                    loss, grads = backward(
                        state, train_set.inputs[batch], train_set.targets[batch]
                    )
                    if not np.isfinite(loss):
                        msg = f"loss became {loss} at {where}"
                        raise TrainingDivergedError(msg)
                    adam_step(state, grads, config.learning_rate)
                except NonFiniteError as e:
                    msg = f"training diverged at {where}: {e}"
                    raise TrainingDivergedError(msg) from e
                loss_sum += loss * batch.size

            val_mae, val_gof = validate(state, val_set, config.thresholds, config.batch_size)
            record = EpochRecord(
                epoch=epoch,
                train_mae=loss_sum / count,
                val_mae=val_mae,
                val_gof=val_gof,
            )
            report.epochs.append(record)
            record_metrics(span, {"train_mae": record.train_mae, "val_mae": val_mae, **val_gof})

        if val_gof[primary] > best_gof:
            best_gof = val_gof[primary]
            report.best_epoch = epoch
            best_state = state.clone()
        if val_mae < best_mae:
            best_mae = val_mae
            report.best_val_mae_epoch = epoch
        logger.info(
            "Epoch %d/%d: train MAE %.5f, val MAE %.5f, val GoF@%s %.2f%% (%.1fs)",
            epoch + 1,
            config.epochs,
            record.train_mae,
            val_mae,
            primary,
            val_gof[primary],
            time.perf_counter() - started,
        )

    report.steps = state.step
    return best_state, report
