"""Runs a network over a dataset and aggregates GoF by interface count."""

import csv
import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike
from telemetry import record_metrics, run_span

from app.errors import DataError, OrderMismatchError, ShapeMismatchError
from app.models.dataset import MIN_DATASET_INTERFACES
from app.models.network import NetworkState, threshold_key
from app.models.report import GofBucket, GofReport, GofTable
from app.models.signal import MAX_INTERFACES, Order
from app.nn.unet import predict
from app.services.dataset_service import read_arrays
from app.utils.peaks import GOF_PASS_PERCENT, gof_rows


logger = logging.getLogger(__name__)

DEFAULT_EVAL_THRESHOLDS = (0.001, 0.01)


def _bucket(interface_count: int, gofs: np.ndarray) -> GofBucket:
    if gofs.size == 0:
        return GofBucket(interface_count=interface_count, below_95=0, size=0)
    q1, median, q3 = np.percentile(gofs, [25, 50, 75])
    return GofBucket(
        interface_count=interface_count,
        below_95=int(np.count_nonzero(gofs < GOF_PASS_PERCENT)),
        size=int(gofs.size),
        mean_gof=float(gofs.mean()),
        gof_min=float(gofs.min()),
        gof_q1=float(q1),
        gof_median=float(median),
        gof_q3=float(q3),
        gof_max=float(gofs.max()),
    )


def evaluate_predictions(
    pred: ArrayLike,
    targets: ArrayLike,
    interface_counts: Sequence[int],
    thresholds: Sequence[float] = DEFAULT_EVAL_THRESHOLDS,
    order: Order = 2,
    primary_threshold: float | None = None,
) -> GofReport:
    """Aggregate per-sample GoF of ``pred`` against ``targets`` (both (S, N), on [0, 1])."""
    p = np.asarray(pred, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    counts = np.asarray(interface_counts, dtype=np.int64)
    if p.shape[0] == 0:
        msg = "cannot evaluate an empty dataset"
        raise DataError(msg)
    if p.shape != t.shape or counts.shape != (p.shape[0],):
        msg = f"predictions {p.shape}, targets {t.shape} and counts {counts.shape} disagree"
        raise ShapeMismatchError(msg)
    if not thresholds:
        msg = "at least one threshold is required"
        raise ValueError(msg)
    primary = thresholds[0] if primary_threshold is None else primary_threshold
    if not all(np.isfinite(t) and t > 0 for t in (*thresholds, primary)):
        msg = f"thresholds must be positive, got {list(thresholds)} (primary {primary})"
        raise ValueError(msg)

    low = min(MIN_DATASET_INTERFACES, int(counts.min()))
    high = max(MAX_INTERFACES, int(counts.max()))
    sample_gof: dict[str, list[float]] = {}
    tables: dict[str, GofTable] = {}
    for threshold in thresholds:
        key = threshold_key(threshold)
        gofs = gof_rows(p, t, threshold)
        sample_gof[key] = gofs.tolist()
        tables[key] = GofTable(
            threshold=threshold,
            buckets=[_bucket(j, gofs[counts == j]) for j in range(low, high + 1)],
            mean_gof=float(gofs.mean()),
        )
    return GofReport(
        order=order,
        primary_threshold=primary,
        interface_counts=counts.tolist(),
        sample_gof=sample_gof,
        tables=tables,
    )


def evaluate(
    state: NetworkState,
    dataset_path: Path,
    thresholds: Sequence[float] = DEFAULT_EVAL_THRESHOLDS,
    *,
    allow_order_mismatch: bool = False,
    batch_size: int = 8,
) -> GofReport:
    """Run ``state`` over every sample of a dataset file and build the GoF report."""
    header, inputs, targets, counts = read_arrays(dataset_path)
    if not counts:
        msg = f"{dataset_path} contains no samples"
        raise DataError(msg)

    warnings = []
    if header.order != state.order:
        message = (
            f"network removes order {state.order} but dataset targets order {header.order}"
        )
        if not allow_order_mismatch:
            raise OrderMismatchError(message)
        logger.warning("%s; proceeding as requested", message)
        warnings.append(message)

    with run_span("evaluate", samples=len(counts), order=header.order) as span:
        pred = predict(state, inputs, batch_size=batch_size)
        report = evaluate_predictions(pred, targets, counts, thresholds, order=header.order)
        record_metrics(span, {f"mean_gof_{k}": t.mean_gof for k, t in report.tables.items()})

    report = report.model_copy(update={"network_order": state.order, "warnings": warnings})
    logger.info(
        "Evaluated %d samples: mean GoF@%s %.3f%%, %d below 95%%",
        len(counts),
        threshold_key(report.primary_threshold),
        report.mean_gof,
        report.primary.total_below_95,
    )
    return report


CSV_COLUMNS = (
    "threshold",
    "interface_count",
    "below_95",
    "size",
    "percent_below",
    "mean_gof",
    "gof_min",
    "gof_q1",
    "gof_median",
    "gof_q3",
    "gof_max",
)


def write_report_csv(report: GofReport, path: Path) -> None:
    """One row per (threshold, interface count) plus a ``total`` row per threshold."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for key, table in report.tables.items():
            for bucket in table.buckets:
                writer.writerow(
                    [
                        key,
                        bucket.interface_count,
                        bucket.below_95,
                        bucket.size,
                        f"{bucket.percent_below:.2f}",
                        *(
                            "" if value is None else f"{value:.4f}"
                            for value in (
                                bucket.mean_gof,
                                bucket.gof_min,
                                bucket.gof_q1,
                                bucket.gof_median,
                                bucket.gof_q3,
                                bucket.gof_max,
                            )
                        ),
                    ],
                )
            writer.writerow(
                [
                    key,
                    "total",
                    table.total_below_95,
                    table.total_size,
                    f"{table.total_percent_below:.2f}",
                    f"{table.mean_gof:.4f}",
                    "",
                    "",
                    "",
                    "",
                    "",
                ],
            )


def write_report_json(report: GofReport, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
