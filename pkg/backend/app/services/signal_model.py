"""Synthesis of nonlinearly modulated interferograms and their nonlinearity-free ground truths."""

import logging
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from app.errors import ConfigurationError
from app.models.signal import Grid, Interface, ObjectSpec, Order, RawSignal
from app.utils.spectral import fft_amplitude, validate_order


logger = logging.getLogger(__name__)


def validate_object(obj: ObjectSpec, grid: Grid) -> None:
    """Check interface frequencies against the grid's admissible band."""
    for index, interface in enumerate(obj.interfaces):
        if not grid.f_min <= interface.freq <= grid.f_max:
            msg = (
                f"interface {index} frequency {interface.freq} outside "
                f"[{grid.f_min}, {grid.f_max}] for n_samples={grid.n_samples}"
            )
            raise ConfigurationError(msg)


def synthesize_signal(obj: ObjectSpec, grid: Grid) -> RawSignal:
    """Sample ``G(u) * sum_j r_j cos(2 pi f_j u + a2_j v^2 + a3_j v^3 + phase_j)``.

    Deterministic; the center sample equals the total reflectivity.
    """
    validate_object(obj, grid)
    u = grid.centered()
    v = 2.0 * u
    freq = np.array([i.freq for i in obj.interfaces])[:, None]
    refl = np.array([i.reflectivity for i in obj.interfaces])[:, None]
    a2 = np.array([i.a2 for i in obj.interfaces])[:, None]
    a3 = np.array([i.a3 for i in obj.interfaces])[:, None]
    offset = np.array([i.phase for i in obj.interfaces])[:, None]

    phase = 2.0 * np.pi * freq * u + a2 * v**2 + a3 * v**3 + offset
    samples = grid.envelope() * np.sum(refl * np.cos(phase), axis=0)
    return RawSignal(samples=samples, grid=grid)


def ground_truth(obj: ObjectSpec, grid: Grid, order: Order) -> NDArray[np.float64]:
    """FFT amplitude of the object with the given nonlinearity order zeroed on every interface."""
    validate_order(order)
    cleaned = synthesize_signal(obj.with_order_removed(order), grid)
    return fft_amplitude(cleaned.samples)


def add_noise(signal: RawSignal, rms: float, rng: np.random.Generator) -> RawSignal:
    """Add white Gaussian noise of the given RMS amplitude."""
    if rms < 0:
        msg = f"noise rms must be non-negative, got {rms}"
        raise ConfigurationError(msg)
    if rms == 0:
        return signal
    noisy = signal.samples + rng.normal(0.0, rms, size=signal.samples.shape)
    return RawSignal(samples=noisy, grid=signal.grid)


def single_interface(
    freq: float,
    a2: float = 0.0,
    a3: float = 0.0,
    reflectivity: float = 1.0,
) -> ObjectSpec:
    """Mirror-like object with one interface."""
    return ObjectSpec(
        interfaces=[Interface(freq=freq, reflectivity=reflectivity, a2=a2, a3=a3)],
    )


def demo_effects(grid: Grid, freq: float, a2: float, a3: float) -> dict[str, RawSignal]:
    """Raw signals showing each nonlinearity alone and both combined."""
    variants = {
        "linear": (0.0, 0.0),
        "second_order": (a2, 0.0),
        "third_order": (0.0, a3),
        "both": (a2, a3),
    }
    return {
        name: synthesize_signal(single_interface(freq, a2=c2, a3=c3), grid)
        for name, (c2, c3) in variants.items()
    }


def read_object(path: Path) -> ObjectSpec:
    """Load an ObjectSpec JSON document."""
    return ObjectSpec.model_validate_json(path.read_text(encoding="utf-8"))


def write_object(obj: ObjectSpec, path: Path) -> None:
    path.write_text(obj.model_dump_json(indent=2), encoding="utf-8")
    logger.debug("Wrote object with %d interfaces to %s", len(obj.interfaces), path)
