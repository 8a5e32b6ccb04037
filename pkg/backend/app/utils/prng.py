"""Seeded random streams.

Each sample index owns an independent PCG64 stream derived from ``SeedSequence(seed,
spawn_key=(index,))``, so a sample's content never depends on which worker produced it or in
which order.
"""

import numpy as np


MAX_SEED = 2**64 - 1


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator for one sample index."""
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(index,))
    return np.random.Generator(np.random.PCG64(sequence))


def run_rng(seed: int) -> np.random.Generator:
    """Generator for run-level randomness (shuffling, initialization)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed)))
