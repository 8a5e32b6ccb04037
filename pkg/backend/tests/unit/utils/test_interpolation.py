"""Tests for monotone interpolation and the seeded random streams."""

import numpy as np
import pytest

from app.utils.interpolation import invert_monotone, resample_at
from app.utils.prng import run_rng, sample_rng


class TestInvertMonotone:
    def test_hits_nodes_exactly(self):
        values = np.arange(11, dtype=np.float64) ** 2
        assert invert_monotone(values, [4.0, 25.0]) == pytest.approx([2.0, 5.0])

    def test_inverse_is_increasing(self):
        values = np.cumsum(np.linspace(0.5, 2.0, 50))
        targets = np.linspace(values[0], values[-1], 200)
        assert np.all(np.diff(invert_monotone(values, targets)) > 0)


class TestResampleAt:
    def test_integer_positions_return_samples(self, mirror_signal, toy_grid):
        samples = mirror_signal(40.0, grid=toy_grid).samples
        positions = np.arange(toy_grid.n_samples, dtype=np.float64)
        assert np.allclose(resample_at(samples, positions), samples, atol=1e-9)

    def test_half_positions_of_slow_cosine(self):
        n = 64
        samples = np.cos(2 * np.pi * 3 * np.arange(n) / n)
        positions = np.arange(n - 1) + 0.5
        expected = np.cos(2 * np.pi * 3 * positions / n)
        assert np.allclose(resample_at(samples, positions), expected, atol=1e-4)


class TestRandomStreams:
    def test_sample_stream_reproducible(self):
        assert np.array_equal(sample_rng(5, 3).random(8), sample_rng(5, 3).random(8))

    def test_sample_streams_independent_of_index(self):
        assert not np.array_equal(sample_rng(5, 3).random(8), sample_rng(5, 4).random(8))

    def test_run_stream_differs_from_sample_streams(self):
        assert not np.array_equal(run_rng(5).random(8), sample_rng(5, 0).random(8))
