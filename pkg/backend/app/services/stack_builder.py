"""Builds second- and third-order amplitude stacks from raw signals."""

import numpy as np
from numpy.typing import ArrayLike, NDArray

from app.errors import DegenerateRangeError, NonFiniteError
from app.models.signal import RawSignal
from app.models.stack import CoeffLadder, Stack
from app.utils.spectral import validate_order


def compensation_matrix(ladder: CoeffLadder, band: NDArray[np.float64]) -> NDArray[np.complex128]:
    """One compensation exponent per ladder row, shape (M, N)."""
    validate_order(ladder.order)
    return np.exp(-1j * ladder.as_array()[:, None] * band[None, :] ** ladder.order)


def build_stack(signal: RawSignal, ladder: CoeffLadder) -> Stack:
    """Row m is ``|FFT(signal * exp(-i C_m v^order))|``; not normalized.

    Rows are computed in one batched transform; each row only reads its own exponent.
    """
    exponents = compensation_matrix(ladder, signal.grid.band())
    rows = np.abs(np.fft.fft(signal.samples[None, :] * exponents, axis=1))
    return Stack(rows=rows, ladder=ladder, normalized=False)


def minmax_normalize(values: ArrayLike) -> NDArray[np.float64]:
    """Affine map of the whole input onto [0, 1] with one global min and max."""
    array = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(array)):
        msg = "cannot normalize non-finite values"
        raise NonFiniteError(msg)
    low = array.min()
    high = array.max()
    if high == low:
        raise DegenerateRangeError
    return (array - low) / (high - low)


def normalize_stack(stack: Stack) -> Stack:
    """Whole-stack min-max normalization, preserving relative row brightness."""
    if stack.normalized:
        return stack
    return Stack(rows=minmax_normalize(stack.rows), ladder=stack.ladder, normalized=True)
