"""Synthetic multi-line objects for B-scan studies.

Depths are given as fractions of the half band ``N/2`` so the same phantom fits any grid.
"""

import logging

import numpy as np

from app.errors import ConfigurationError
from app.models.calibration import SystemDistortion
from app.models.signal import MAX_INTERFACES, Grid, Interface, ObjectSpec, RawSignal
from app.services.signal_model import add_noise, synthesize_signal
from app.utils.prng import sample_rng


logger = logging.getLogger(__name__)

DEFAULT_LINES = 256


def glass_objects(
    grid: Grid,
    lines: int = DEFAULT_LINES,
    front: tuple[float, float] = (0.3, 0.5),
    thickness: float = 0.25,
    glass_a2: float = 15.0,
    artefact_reflectivity: float = 0.3,
) -> list[ObjectSpec]:
    """Tilted glass plate: front and back surfaces plus the inter-surface artefact.

    The front surface moves linearly from ``front[0]`` to ``front[1]`` across the lines; the back
    surface follows at constant ``thickness`` and carries the plate's own quadratic phase. The
    artefact sits at the surface separation and therefore at the same depth on every line.
    """
    if lines < 1:
        msg = f"lines must be positive, got {lines}"
        raise ConfigurationError(msg)
    half = grid.n_samples / 2
    separation = thickness * half
    fronts = np.linspace(front[0], front[1], lines) * half
    return [
        ObjectSpec(
            interfaces=[
                Interface(freq=separation, reflectivity=artefact_reflectivity),
                Interface(freq=float(depth), reflectivity=1.0),
                Interface(freq=float(depth) + separation, reflectivity=0.8, a2=glass_a2),
            ],
        )
        for depth in fronts
    ]


def layered_objects(
    grid: Grid,
    lines: int = DEFAULT_LINES,
    layers: int = 4,
    a2_per_layer: float = 6.0,
    undulation: float = 0.04,
) -> list[ObjectSpec]:
    """Smoothly undulating layers whose accumulated dispersion grows with depth."""
    if not 1 <= layers <= MAX_INTERFACES:
        msg = f"layers must lie within [1, {MAX_INTERFACES}], got {layers}"
        raise ConfigurationError(msg)
    if lines < 1:
        msg = f"lines must be positive, got {lines}"
        raise ConfigurationError(msg)
    half = grid.n_samples / 2
    bases = np.linspace(0.15, 0.7, layers) if layers > 1 else np.array([0.5])
    phase = 2.0 * np.pi * np.arange(lines) / lines
    objects = []
    for line in range(lines):
        interfaces = [
            Interface(
                freq=float((base + undulation * np.sin(phase[line] + k)) * half),
                reflectivity=float(0.9**k),
                a2=a2_per_layer * k,
            )
            for k, base in enumerate(bases)
        ]
        objects.append(ObjectSpec(interfaces=interfaces))
    return objects


def render(
    objects: list[ObjectSpec],
    grid: Grid,
    system: SystemDistortion | None = None,
    snr_db: float | None = None,
    seed: int = 0,
) -> list[RawSignal]:
    """Raw lines of ``objects`` recorded through ``system``, with optional white noise.

    Noise RMS is set per line from the line's own RMS and ``snr_db``; each line draws from its
    own seeded stream.
    """
    signals = []
    for line, obj in enumerate(objects):
        measured = system.apply(obj) if system is not None else obj
        signal = synthesize_signal(measured, grid)
        if snr_db is not None:
            rms = float(np.sqrt(np.mean(signal.samples**2))) / 10.0 ** (snr_db / 20.0)
            signal = add_noise(signal, rms, sample_rng(seed, line))
        signals.append(signal)
    logger.debug("Rendered %d phantom lines on n_samples=%d", len(signals), grid.n_samples)
    return signals


def glass_phantom(
    grid: Grid,
    lines: int = DEFAULT_LINES,
    system: SystemDistortion | None = None,
) -> list[RawSignal]:
    return render(glass_objects(grid, lines), grid, system)


def layered_phantom(
    grid: Grid,
    lines: int = DEFAULT_LINES,
    system: SystemDistortion | None = None,
    snr_db: float | None = 30.0,
    seed: int = 0,
) -> list[RawSignal]:
    return render(layered_objects(grid, lines), grid, system, snr_db=snr_db, seed=seed)
