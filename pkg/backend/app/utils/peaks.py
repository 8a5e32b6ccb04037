"""GoF, MAE and peak-shape diagnostics."""

import numpy as np
from numpy.typing import ArrayLike, NDArray

from app.errors import PeakNotFoundError, ShapeMismatchError


NORMALIZED_TOLERANCE = 1e-9
GOF_PASS_PERCENT = 95.0


def _validate_normalized(name: str, values: NDArray[np.float64]) -> None:
    if values.min() < -NORMALIZED_TOLERANCE or values.max() > 1.0 + NORMALIZED_TOLERANCE:
        msg = f"{name} must be normalized to [0, 1], got range [{values.min()}, {values.max()}]"
        raise ValueError(msg)


def gof(pred: ArrayLike, gt: ArrayLike, threshold: float) -> float:
    """Percentage of samples within ``threshold`` of the ground truth (inclusive).

    Both vectors live on [0, 1], so the threshold is a fraction of the value span.
    """
    p = np.asarray(pred, dtype=np.float64)
    g = np.asarray(gt, dtype=np.float64)
    if p.shape != g.shape or p.ndim != 1 or p.size == 0:
        msg = f"gof needs equal-length vectors, got {p.shape} and {g.shape}"
        raise ShapeMismatchError(msg)
    if threshold <= 0:
        msg = f"threshold must be positive, got {threshold}"
        raise ValueError(msg)
    _validate_normalized("prediction", p)
    _validate_normalized("ground truth", g)
    return 100.0 * float(np.count_nonzero(np.abs(p - g) <= threshold)) / p.size


def gof_rows(pred: ArrayLike, gt: ArrayLike, threshold: float) -> NDArray[np.float64]:
    """Row-wise GoF for (samples, width) matrices, no range validation."""
    p = np.asarray(pred, dtype=np.float64)
    g = np.asarray(gt, dtype=np.float64)
    if p.shape != g.shape or p.ndim != 2:
        msg = f"gof_rows needs equal (samples, width) matrices, got {p.shape} and {g.shape}"
        raise ShapeMismatchError(msg)
    return 100.0 * np.count_nonzero(np.abs(p - g) <= threshold, axis=1) / p.shape[1]


def mae(pred: ArrayLike, target: ArrayLike) -> float:
    """Mean absolute error."""
    p = np.asarray(pred, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    if p.shape != t.shape:
        msg = f"mae needs equal shapes, got {p.shape} and {t.shape}"
        raise ShapeMismatchError(msg)
    return float(np.mean(np.abs(p - t)))


def find_peak(amp: ArrayLike, lo: int = 0, hi: int | None = None) -> int:
    """Index of the maximum of ``amp[lo:hi]``."""
    a = np.asarray(amp, dtype=np.float64)
    hi = a.shape[0] if hi is None else hi
    lo = max(lo, 0)
    hi = min(hi, a.shape[0])
    if hi <= lo:
        msg = f"empty search window [{lo}, {hi})"
        raise PeakNotFoundError(msg)
    return lo + int(np.argmax(a[lo:hi]))


def half_max_distances(amp: ArrayLike, peak_bin: int) -> tuple[float, float]:
    """Distances from ``peak_bin`` to the left and right half-maximum crossings.

    Walks outward from the peak and interpolates linearly between the last sample above
    half maximum and the first one at or below it.
    """
    a = np.asarray(amp, dtype=np.float64)
    n = a.shape[0]
    if not 0 <= peak_bin < n:
        msg = f"peak bin {peak_bin} outside [0, {n})"
        raise PeakNotFoundError(msg)
    peak = a[peak_bin]
    if peak <= 0 or (peak_bin > 0 and a[peak_bin - 1] > peak) or (
        peak_bin < n - 1 and a[peak_bin + 1] > peak
    ):
        msg = f"bin {peak_bin} is not a positive local maximum"
        raise PeakNotFoundError(msg)
    half = peak / 2.0

    k = peak_bin
    while k + 1 < n and a[k + 1] > half:
        k += 1
    if k + 1 >= n:
        msg = f"no half-maximum crossing right of bin {peak_bin}"
        raise PeakNotFoundError(msg)
    right = (k - peak_bin) + (a[k] - half) / (a[k] - a[k + 1])

    k = peak_bin
    while k - 1 >= 0 and a[k - 1] > half:
        k -= 1
    if k - 1 < 0:
        msg = f"no half-maximum crossing left of bin {peak_bin}"
        raise PeakNotFoundError(msg)
    left = (peak_bin - k) + (a[k] - half) / (a[k] - a[k - 1])
    return float(left), float(right)


def fwhm(amp: ArrayLike, peak_bin: int) -> float:
    """Full width at half maximum in bins."""
    left, right = half_max_distances(amp, peak_bin)
    return left + right


def peak_asymmetry(amp: ArrayLike, peak_bin: int) -> float:
    """Right/left half-maximum distance ratio minus one; zero for symmetric peaks."""
    left, right = half_max_distances(amp, peak_bin)
    return right / left - 1.0


def transform_limit_fwhm(sigma: float) -> float:
    """Analytic FWHM (bins) of the unchirped peak for a Gaussian envelope of width sigma."""
    return float(2.0 * np.sqrt(2.0 * np.log(2.0)) / (2.0 * np.pi * sigma))
