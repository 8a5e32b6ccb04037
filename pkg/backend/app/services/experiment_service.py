"""Mirror study, B-scan assembly and the object-dispersion comparison.

Four pipelines turn a raw line into an amplitude line: ``raw`` (plain FFT amplitude), ``net1`` and
``net2`` (order-2 and order-3 networks over a compensation stack) and ``baseline`` (two-mirror
resampling plus phase compensation).
"""

import logging
from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray
from telemetry import record_metrics, run_span

from app.errors import (
    ConfigurationError,
    DataError,
    OrderMismatchError,
    PeakNotFoundError,
    ShapeMismatchError,
)
from app.models.calibration import DEFAULT_GUARD, CalibrationMap, SystemDistortion
from app.models.experiment import (
    DEFAULT_MIRROR_DEPTHS,
    DEFAULT_SYSTEM,
    BScan,
    DispersionRow,
    MirrorRow,
    MirrorStudyResult,
    PeakMetrics,
    Pipeline,
)
from app.models.network import NetworkState
from app.models.signal import Grid, Order, RawSignal
from app.models.stack import CoeffLadder
from app.nn.unet import predict
from app.services.baseline_service import calibrate_system, distorted_mirror, linearize
from app.services.signal_model import single_interface, synthesize_signal
from app.services.stack_builder import build_stack, normalize_stack
from app.utils.peaks import find_peak, half_max_distances, transform_limit_fwhm
from app.utils.spectral import fft_amplitude


logger = logging.getLogger(__name__)

PIPELINE_ORDERS: dict[Pipeline, Order] = {"net1": 2, "net2": 3}


def peak_metrics(amp: NDArray[np.float64]) -> PeakMetrics:
    """Metrics of the strongest peak in the positive half of an amplitude line."""
    n = amp.shape[0]
    peak_bin = find_peak(amp, 1, n // 2)
    positive = amp[1 : n // 2]
    total = float(np.sum(positive))
    fraction = float(amp[peak_bin]) / total if total > 0 else float("nan")
    try:
        left, right = half_max_distances(amp, peak_bin)
    except PeakNotFoundError as exc:
        logger.warning("No full width at bin %d: %s", peak_bin, exc)
        return PeakMetrics(
            peak_bin=peak_bin,
            fwhm=float("nan"),
            asymmetry=float("nan"),
            peak_fraction=fraction,
        )
    return PeakMetrics(
        peak_bin=peak_bin,
        fwhm=left + right,
        asymmetry=right / left - 1.0,
        peak_fraction=fraction,
    )


def _check_grids(signals: Sequence[RawSignal]) -> Grid:
    if not signals:
        msg = "no lines to process"
        raise DataError(msg)
    grid = signals[0].grid
    for index, signal in enumerate(signals):
        if signal.grid != grid:
            msg = f"line {index} uses {signal.grid}, line 0 uses {grid}"
            raise ShapeMismatchError(msg)
    return grid


def check_network(state: NetworkState, pipeline: Pipeline, grid: Grid) -> None:
    """Order tag and line width of ``state`` must suit ``pipeline`` on ``grid``."""
    expected = PIPELINE_ORDERS[pipeline]
    if state.order != expected:
        msg = f"{pipeline} needs an order-{expected} network, got order {state.order}"
        raise OrderMismatchError(msg)
    if state.config.width != grid.n_samples:
        msg = f"network width {state.config.width} does not match n_samples={grid.n_samples}"
        raise ShapeMismatchError(msg)


def network_ladder(state: NetworkState, maximum: float | None = None) -> CoeffLadder:
    """Ladder matching the network's order and row count.

    Defaults to the maximum recorded at training time, then to the order's default ladder.
    """
    trained = state.config.ladder_max
    if maximum is None:
        maximum = trained
    elif trained is not None and not np.isclose(maximum, trained):
        logger.warning(
            "Ladder maximum %g differs from the %g the order-%d network was trained on",
            maximum,
            trained,
            state.order,
        )
    if maximum is None:
        return CoeffLadder.default(state.order, size=state.config.rows)
    return CoeffLadder(order=state.order, maximum=maximum, size=state.config.rows)


def process_lines(
    signals: Sequence[RawSignal],
    pipeline: Pipeline,
    *,
    net: NetworkState | None = None,
    calibration: CalibrationMap | None = None,
    ladder: CoeffLadder | None = None,
) -> NDArray[np.float64]:
    """Amplitude line per input line, in input order, shape (lines, n_samples)."""
    grid = _check_grids(signals)
    if pipeline == "raw":
        return np.stack([fft_amplitude(s.samples) for s in signals])
    if pipeline == "baseline":
        if calibration is None:
            msg = "baseline pipeline needs a calibration"
            raise ConfigurationError(msg)
        return np.stack([linearize(s, calibration) for s in signals])

    if net is None:
        msg = f"{pipeline} pipeline needs a network"
        raise ConfigurationError(msg)
    check_network(net, pipeline, grid)
    ladder = ladder or network_ladder(net)
    if ladder.size != net.config.rows or ladder.order != net.order:
        msg = (
            f"ladder (order {ladder.order}, {ladder.size} rows) does not fit the "
            f"order-{net.order} network with {net.config.rows} rows"
        )
        raise ShapeMismatchError(msg)
    inputs = np.stack([normalize_stack(build_stack(s, ladder)).rows for s in signals])
    outputs = predict(net, inputs[:, None, :, :].astype(net.config.dtype))
    return np.asarray(outputs, dtype=np.float64)


def assemble_bscan(
    signals: Sequence[RawSignal],
    pipeline: Pipeline,
    *,
    net: NetworkState | None = None,
    calibration: CalibrationMap | None = None,
    ladder: CoeffLadder | None = None,
) -> BScan:
    """Process every lateral line and stack the results into an image."""
    grid = _check_grids(signals)
    with run_span("experiment.bscan", pipeline=pipeline, lines=len(signals)):
        lines = process_lines(signals, pipeline, net=net, calibration=calibration, ladder=ladder)
    logger.info("Assembled %d-line B-scan with the %s pipeline", len(signals), pipeline)
    return BScan(lines=lines, grid=grid, pipeline=pipeline)


def pipeline_for(state: NetworkState) -> Pipeline:
    """Network pipeline matching the state's order tag."""
    return "net1" if state.order == 2 else "net2"


def default_calibration_depths(grid: Grid) -> tuple[float, float]:
    """Mirror depths at 40 and 240 bins of a 1024-sample grid, scaled to ``grid``."""
    scale = grid.n_samples / 1024
    return 40.0 * scale, 240.0 * scale


def _calibration_depths(depths: Sequence[float]) -> tuple[float, float]:
    return float(depths[0]), float(depths[len(depths) // 2])


def mirror_study(
    depths: Sequence[float] = DEFAULT_MIRROR_DEPTHS,
    system: SystemDistortion = DEFAULT_SYSTEM,
    net1: NetworkState | None = None,
    net2: NetworkState | None = None,
    calibration: CalibrationMap | None = None,
    *,
    grid: Grid | None = None,
    ladders: dict[Pipeline, CoeffLadder] | None = None,
    guard: int = DEFAULT_GUARD,
) -> MirrorStudyResult:
    """Single mirrors at every depth through every available pipeline.

    Without an explicit calibration one is built from the first and middle depths.
    """
    if len(depths) < 2:
        msg = f"mirror study needs at least 2 depths, got {len(depths)}"
        raise ConfigurationError(msg)
    grid = grid or Grid()
    ladders = ladders or {}
    nets: tuple[tuple[Pipeline, NetworkState | None], ...] = (("net1", net1), ("net2", net2))
    for pipeline, net in nets:
        if net is not None:
            check_network(net, pipeline, grid)

    calibration_depths = None
    if calibration is None:
        calibration_depths = _calibration_depths(depths)
        calibration = calibrate_system(system, grid, calibration_depths, guard=guard)

    with run_span("experiment.mirror_study", depths=len(depths)) as span:
        signals = [distorted_mirror(depth, grid, system) for depth in depths]
        raw = [peak_metrics(a) for a in process_lines(signals, "raw")]
        baseline = [
            peak_metrics(a) for a in process_lines(signals, "baseline", calibration=calibration)
        ]
        learned: dict[Pipeline, list[PeakMetrics]] = {}
        for pipeline, net in nets:
            if net is not None:
                amps = process_lines(signals, pipeline, net=net, ladder=ladders.get(pipeline))
                learned[pipeline] = [peak_metrics(a) for a in amps]

        rows = [
            MirrorRow(
                depth=float(depth),
                raw=raw[index],
                baseline=baseline[index],
                net1=learned["net1"][index] if "net1" in learned else None,
                net2=learned["net2"][index] if "net2" in learned else None,
            )
            for index, depth in enumerate(depths)
        ]
        result = MirrorStudyResult(
            grid=grid,
            system=system,
            calibration_depths=calibration_depths,
            transform_limit=transform_limit_fwhm(grid.envelope_sigma),
            rows=rows,
        )
        record_metrics(
            span,
            {
                "raw_fwhm_max": float(np.nanmax(result.column("raw", "fwhm"))),
                "baseline_fwhm_max": float(np.nanmax(result.column("baseline", "fwhm"))),
            },
        )
    logger.info("Mirror study over %d depths complete", len(depths))
    return result


def dispersion_comparison(
    object_a2: Sequence[float],
    depth: float,
    calibration: CalibrationMap,
    system: SystemDistortion = DEFAULT_SYSTEM,
    net1: NetworkState | None = None,
    *,
    grid: Grid | None = None,
    ladder: CoeffLadder | None = None,
) -> list[DispersionRow]:
    """Interfaces with their own quadratic phase, measured through a system-only calibration.

    The calibration only knows the instrument, so object dispersion survives the baseline while
    an order-2 network removes it.
    """
    grid = grid or Grid()
    if net1 is not None:
        check_network(net1, "net1", grid)
    signals = [
        synthesize_signal(system.apply(single_interface(depth, a2=a2)), grid) for a2 in object_a2
    ]
    raw = process_lines(signals, "raw")
    baseline = process_lines(signals, "baseline", calibration=calibration)
    net = (
        process_lines(signals, "net1", net=net1, ladder=ladder) if net1 is not None else None
    )
    return [
        DispersionRow(
            object_a2=float(a2),
            raw=peak_metrics(raw[i]),
            baseline=peak_metrics(baseline[i]),
            net1=peak_metrics(net[i]) if net is not None else None,
        )
        for i, a2 in enumerate(object_a2)
    ]
