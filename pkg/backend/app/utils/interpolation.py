"""Monotone cubic (PCHIP) interpolation helpers."""

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import signal as scipy_signal
from scipy.interpolate import PchipInterpolator


OVERSAMPLE = 8


def invert_monotone(values: ArrayLike, targets: ArrayLike) -> NDArray[np.float64]:
    """Fractional indices at which a strictly increasing sequence reaches ``targets``."""
    y = np.asarray(values, dtype=np.float64)
    index = np.arange(y.shape[0], dtype=np.float64)
    return np.asarray(PchipInterpolator(y, index)(np.asarray(targets, dtype=np.float64)))


def resample_at(
    samples: ArrayLike,
    positions: ArrayLike,
    oversample: int = OVERSAMPLE,
) -> NDArray[np.float64]:
    """Values of a band-limited signal at fractional sample positions.

    The signal is first Fourier-upsampled by ``oversample`` so the cubic interpolant works on a
    densely sampled curve; integer positions return the original samples.
    """
    x = np.asarray(samples, dtype=np.float64)
    n = x.shape[0]
    if oversample > 1:
        fine = np.asarray(scipy_signal.resample(x, n * oversample), dtype=np.float64)
        grid = np.arange(n * oversample, dtype=np.float64) / oversample
    else:
        fine = x
        grid = np.arange(n, dtype=np.float64)
    return np.asarray(PchipInterpolator(grid, fine)(np.asarray(positions, dtype=np.float64)))
