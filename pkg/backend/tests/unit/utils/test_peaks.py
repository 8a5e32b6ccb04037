"""Tests for GoF, MAE and peak-shape diagnostics."""

import numpy as np
import pytest

from app.errors import PeakNotFoundError, ShapeMismatchError
from app.utils.peaks import (
    find_peak,
    fwhm,
    gof,
    gof_rows,
    half_max_distances,
    mae,
    peak_asymmetry,
    transform_limit_fwhm,
)
from app.utils.spectral import fft_amplitude


class TestGof:
    """Goodness-of-fit percentage."""

    def test_identity_is_100(self, rng):
        x = rng.random(500)
        for threshold in (1e-6, 1e-3, 0.5):
            assert gof(x, x, threshold) == 100.0

    def test_constructed_half(self):
        """Half the samples off by 0.5 gives exactly 50%."""
        pred = np.zeros(10)
        gt = np.array([0.0] * 5 + [0.5] * 5)
        assert gof(pred, gt, 0.01) == 50.0

    def test_boundary_is_inclusive(self):
        assert gof([0.25], [0.5], 0.25) == 100.0

    def test_monotone_in_threshold(self, rng):
        thresholds = np.sort(rng.uniform(1e-4, 0.5, size=20))
        for _ in range(1000 // 20):
            pred, gt = rng.random(64), rng.random(64)
            values = [gof(pred, gt, t) for t in thresholds]
            assert values == sorted(values)

    def test_symmetric(self, rng):
        a, b = rng.random(100), rng.random(100)
        assert gof(a, b, 0.1) == gof(b, a, 0.1)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            gof(np.zeros(3), np.zeros(4), 0.1)

    def test_non_positive_threshold(self):
        with pytest.raises(ValueError, match="threshold must be positive"):
            gof(np.zeros(3), np.zeros(3), 0.0)

    def test_unnormalized_input(self):
        with pytest.raises(ValueError, match="normalized"):
            gof(np.array([1.5, 0.0]), np.zeros(2), 0.1)

    def test_rows_match_single(self, rng):
        pred, gt = rng.random((4, 32)), rng.random((4, 32))
        rows = gof_rows(pred, gt, 0.2)
        assert rows.tolist() == [gof(p, g, 0.2) for p, g in zip(pred, gt, strict=True)]

    def test_rows_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            gof_rows(np.zeros((2, 3)), np.zeros((3, 3)), 0.1)


class TestMae:
    def test_value(self):
        assert mae([0.0, 1.0], [0.5, 0.5]) == 0.5

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            mae([0.0], [0.0, 1.0])


class TestPeakShape:
    """FWHM, asymmetry and peak search."""

    def test_triangle(self):
        amp = [0.0, 0.5, 1.0, 0.75, 0.5, 0.25, 0.0]
        assert half_max_distances(amp, 2) == (1.0, 2.0)
        assert fwhm(amp, 2) == 3.0
        assert peak_asymmetry(amp, 2) == 1.0

    def test_gaussian_width(self):
        x = np.arange(101) - 50.0
        amp = np.exp(-(x**2) / (2 * 10.0**2))
        assert fwhm(amp, 50) == pytest.approx(2 * np.sqrt(2 * np.log(2)) * 10.0, abs=0.2)
        assert peak_asymmetry(amp, 50) == pytest.approx(0.0, abs=1e-9)

    def test_missing_crossing(self):
        with pytest.raises(PeakNotFoundError, match="right of bin 0"):
            fwhm([1.0, 0.9, 0.8], 0)

    def test_not_a_maximum(self):
        with pytest.raises(PeakNotFoundError, match="not a positive local maximum"):
            fwhm([0.0, 0.5, 1.0, 0.0], 1)

    def test_find_peak_window(self):
        amp = np.array([9.0, 1.0, 3.0, 2.0, 8.0])
        assert find_peak(amp) == 0
        assert find_peak(amp, 1, 4) == 2

    def test_find_peak_empty_window(self):
        with pytest.raises(PeakNotFoundError, match="empty search window"):
            find_peak([1.0, 2.0], 2, 2)

    def test_transform_limit(self):
        assert transform_limit_fwhm(0.15) == pytest.approx(2.4986, abs=1e-3)

    def test_unchirped_mirror_near_transform_limit(self, mirror_signal):
        amp = fft_amplitude(mirror_signal(200.0).samples)
        peak = find_peak(amp, 1, 512)
        assert peak == 200
        assert fwhm(amp, peak) == pytest.approx(transform_limit_fwhm(0.15), rel=0.06)

    def test_large_chirp_far_beyond_transform_limit(self, mirror_signal):
        amp = fft_amplitude(mirror_signal(200.0, a2=60.0).samples)
        assert fwhm(amp, find_peak(amp, 1, 512)) > 10.0
