"""Classical two-mirror linearization.

Two mirror interferograms recorded through the same system share the interferometer phase, so
the difference of their unwrapped phases depends only on the pixel-to-wavenumber mapping.
Inverting that difference gives the resampling positions; the phase left on a resampled mirror
after removing its linear (depth) term is the interferometer compensation.
"""

import logging
from pathlib import Path

import numpy as np
from numpy.polynomial import Polynomial
from numpy.typing import NDArray
from telemetry import record_metrics, run_span

from app.errors import CalibrationError, ShapeMismatchError
from app.models.calibration import (
    DEFAULT_GUARD,
    MIN_MIRROR_SEPARATION,
    CalibrationMap,
    SystemDistortion,
)
from app.models.signal import Grid, RawSignal
from app.services.signal_model import single_interface, synthesize_signal
from app.utils.interpolation import invert_monotone, resample_at
from app.utils.peaks import find_peak
from app.utils.spectral import amplitude, analytic_signal, fft, fft_amplitude, unwrapped_phase


logger = logging.getLogger(__name__)

SMOOTHING_DEGREE = 4


def mirror_depth(signal: RawSignal) -> int:
    """Bin of the strongest positive-frequency peak."""
    n = signal.grid.n_samples
    return find_peak(fft_amplitude(signal.samples), 1, n // 2)


def _interior(n: int, guard: int) -> slice:
    if n - 2 * guard < SMOOTHING_DEGREE + 2:
        msg = f"guard {guard} leaves too few samples of {n} for calibration"
        raise CalibrationError(msg)
    return slice(guard, n - guard)


def calibrate(
    sig1: RawSignal,
    sig2: RawSignal,
    guard: int = DEFAULT_GUARD,
) -> CalibrationMap:
    """Build a calibration map from two single-mirror signals at different depths."""
    if sig1.grid != sig2.grid:
        msg = f"mirror signals use different grids: {sig1.grid} vs {sig2.grid}"
        raise ShapeMismatchError(msg)
    n = sig1.grid.n_samples
    interior = _interior(n, guard)

    depth1, depth2 = mirror_depth(sig1), mirror_depth(sig2)
    if abs(depth1 - depth2) < MIN_MIRROR_SEPARATION:
        msg = (
            f"mirror depths {depth1} and {depth2} are closer than {MIN_MIRROR_SEPARATION} bins; "
            "mirror depths too close or signals invalid"
        )
        raise CalibrationError(msg)

    with run_span("baseline.calibrate", depth1=depth1, depth2=depth2, guard=guard) as span:
        phase1 = unwrapped_phase(analytic_signal(sig1))
        phase2 = unwrapped_phase(analytic_signal(sig2))
        delta = phase1 - phase2
        pixels = np.arange(n, dtype=np.float64)

        fit = Polynomial.fit(pixels[interior], delta[interior], SMOOTHING_DEGREE)
        smooth = fit(pixels)
        if smooth[-1] < smooth[0]:
            smooth = -smooth
        if np.any(np.diff(smooth) <= 0):
            msg = (
                "phase difference is not monotone after smoothing: "
                "mirror depths too close or signals invalid"
            )
            raise CalibrationError(msg)

        uniform = np.linspace(smooth[0], smooth[-1], n)
        positions = invert_monotone(smooth, uniform)
        # Pin the end points against round-off in the inverse.
        positions[0], positions[-1] = 0.0, float(n - 1)

        resampled = resample_at(sig1.samples, positions)
        phase = unwrapped_phase(analytic_signal(resampled))
        line = Polynomial.fit(pixels[interior], phase[interior], 1)
        residual = phase - line(pixels)
        record_metrics(
            span,
            {
                "max_position_shift": float(np.max(np.abs(positions - pixels))),
                "residual_rms": float(np.sqrt(np.mean(residual[interior] ** 2))),
            },
        )

    logger.info("Calibrated from mirrors at bins %d and %d", depth1, depth2)
    return CalibrationMap(resample_positions=positions, residual_phase=residual, guard=guard)


def linearize(signal: RawSignal, calibration: CalibrationMap) -> NDArray[np.float64]:
    """FFT amplitude of the resampled, phase-compensated analytic signal."""
    if signal.grid.n_samples != calibration.n_samples:
        msg = (
            f"signal has {signal.grid.n_samples} samples, "
            f"calibration expects {calibration.n_samples}"
        )
        raise ShapeMismatchError(msg)
    resampled = resample_at(signal.samples, calibration.resample_positions)
    corrected = analytic_signal(resampled) * np.exp(-1j * calibration.residual_phase)
    return amplitude(fft(corrected))


def distorted_mirror(depth: float, grid: Grid, system: SystemDistortion) -> RawSignal:
    """Single-mirror interferogram recorded through ``system``."""
    return synthesize_signal(system.apply(single_interface(depth)), grid)


def calibrate_system(
    system: SystemDistortion,
    grid: Grid,
    depths: tuple[float, float],
    guard: int = DEFAULT_GUARD,
) -> CalibrationMap:
    """Calibration from two synthetic mirrors recorded through ``system``."""
    first, second = (distorted_mirror(d, grid, system) for d in depths)
    return calibrate(first, second, guard=guard)


def read_calibration(path: Path) -> CalibrationMap:
    return CalibrationMap.model_validate_json(path.read_text(encoding="utf-8"))


def write_calibration(calibration: CalibrationMap, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(calibration.model_dump_json(), encoding="utf-8")
