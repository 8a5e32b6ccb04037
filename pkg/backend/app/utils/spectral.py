"""FFT, analytic-signal and phase primitives shared by every pipeline stage.

Conventions: forward transform is unnormalized, ``X[k] = sum_n x[n] exp(-2 pi i n k / N)``; the
inverse divides by N. Everything here runs in float64/complex128.
"""

from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import signal as scipy_signal

from app.errors import ConfigurationError, NonFiniteError, ShapeMismatchError
from app.models.signal import Grid, RawSignal


@dataclass(frozen=True, slots=True)
class ComplexSpectrum:
    """Complex DFT bins of a power-of-two length signal."""

    bins: NDArray[np.complex128]

    def __len__(self) -> int:
        return int(self.bins.shape[0])


@dataclass(frozen=True, slots=True)
class PhaseProfile:
    """Phase in radians, optionally unwrapped."""

    phase: NDArray[np.float64]
    unwrapped: bool = False


def is_power_of_two(n: int) -> bool:
    return n > 0 and not n & (n - 1)


def _as_power_of_two_vector(x: ArrayLike, dtype: type[np.generic]) -> NDArray[Any]:
    array = np.asarray(x, dtype=dtype)
    if array.ndim != 1:
        msg = f"expected a 1-D vector, got shape {array.shape}"
        raise ShapeMismatchError(msg)
    if not is_power_of_two(array.shape[0]):
        msg = f"length {array.shape[0]} is not a power of two"
        raise ShapeMismatchError(msg)
    return array


def fft(x: ArrayLike) -> ComplexSpectrum:
    """Unnormalized forward DFT of a power-of-two length vector."""
    array = _as_power_of_two_vector(x, np.complex128)
    return ComplexSpectrum(bins=np.fft.fft(array))


def ifft(spectrum: ComplexSpectrum | ArrayLike) -> NDArray[np.complex128]:
    """Inverse DFT, scaled by 1/N."""
    bins = spectrum.bins if isinstance(spectrum, ComplexSpectrum) else spectrum
    array = _as_power_of_two_vector(bins, np.complex128)
    return np.fft.ifft(array)


def amplitude(spectrum: ComplexSpectrum | ArrayLike) -> NDArray[np.float64]:
    """Elementwise modulus of spectral bins."""
    bins = spectrum.bins if isinstance(spectrum, ComplexSpectrum) else np.asarray(spectrum)
    return np.abs(bins).astype(np.float64, copy=False)


def fft_amplitude(x: ArrayLike) -> NDArray[np.float64]:
    """Shorthand for ``amplitude(fft(x))``."""
    return amplitude(fft(x))


def validate_order(order: int) -> None:
    if order not in (2, 3):
        msg = f"nonlinearity order must be 2 or 3, got {order}"
        raise ConfigurationError(msg)


def compensation_exponent(grid: Grid, order: int, coeff: float) -> NDArray[np.complex128]:
    """Unit-modulus compensation vector ``exp(-i * coeff * v**order)``.

    With ``coeff`` equal to an interface's coefficient the positive-frequency component loses its
    chirp while the mirror component carries it doubled.
    """
    validate_order(order)
    if not np.isfinite(coeff):
        msg = f"compensation coefficient must be finite, got {coeff}"
        raise NonFiniteError(msg)
    v = grid.band()
    return np.exp(-1j * coeff * v**order)


def analytic_signal(x: RawSignal | ArrayLike) -> NDArray[np.complex128]:
    """Analytic signal: negative-frequency bins zeroed, bins 0 and N/2 kept at unit weight."""
    samples = x.samples if isinstance(x, RawSignal) else x
    array = _as_power_of_two_vector(samples, np.float64)
    return np.asarray(scipy_signal.hilbert(array), dtype=np.complex128)


def phase_of(z: ArrayLike) -> PhaseProfile:
    """Wrapped phase of a complex vector."""
    return PhaseProfile(phase=np.angle(np.asarray(z, dtype=np.complex128)), unwrapped=False)


def unwrap_phase(profile: PhaseProfile) -> PhaseProfile:
    """Add 2*pi multiples so consecutive differences fall in (-pi, pi]; first element kept.

    ``np.unwrap`` leaves a step of exactly -pi in place; here it becomes +pi.
    """
    phase = np.array(profile.phase, dtype=np.float64)
    if phase.size > 1:
        steps = np.diff(phase)
        corrections = -2.0 * np.pi * np.ceil((steps - np.pi) / (2.0 * np.pi))
        phase[1:] += np.cumsum(corrections)
    return PhaseProfile(phase=phase, unwrapped=True)


def unwrapped_phase(z: ArrayLike) -> NDArray[np.float64]:
    """Unwrapped phase of a complex vector as a plain array."""
    return unwrap_phase(phase_of(z)).phase
