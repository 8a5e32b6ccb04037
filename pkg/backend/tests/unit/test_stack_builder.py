"""Tests for compensation ladders and amplitude stacks."""

import numpy as np
import pytest
from pydantic import ValidationError

from app.errors import DegenerateRangeError, NonFiniteError
from app.models.stack import CoeffLadder, Stack
from app.services.stack_builder import build_stack, minmax_normalize, normalize_stack
from app.utils.peaks import find_peak, fwhm
from app.utils.spectral import compensation_exponent, fft_amplitude


class TestCoeffLadder:
    """Symmetric compensation ladders."""

    def test_default_ladders(self):
        a2 = CoeffLadder.default(2)
        a3 = CoeffLadder.default(3)
        assert a2.size == 32
        assert a2.values[0] == -60.0
        assert a2.values[-1] == 60.0
        assert a3.values[-1] == 30.0

    def test_symmetric(self):
        values = CoeffLadder.default(2).as_array()
        assert np.allclose(values, -values[::-1])

    def test_nearest_row(self):
        ladder = CoeffLadder(order=2, maximum=60.0, size=5)
        assert ladder.values == [-60.0, -30.0, 0.0, 30.0, 60.0]
        assert ladder.nearest_row(29.0) == 3
        assert ladder.nearest_row(-45.0) == 0

    def test_rejects_single_row(self):
        with pytest.raises(ValidationError):
            CoeffLadder(order=2, maximum=60.0, size=1)


class TestBuildStack:
    """Row-wise compensated FFT amplitudes."""

    def test_shape_and_flags(self, mirror_signal):
        stack = build_stack(mirror_signal(200.0, a2=30.0), CoeffLadder.default(2))
        assert stack.shape == (32, 1024)
        assert not stack.normalized

    def test_rows_are_independent_transforms(self, mirror_signal, default_grid):
        signal = mirror_signal(150.0, a3=12.0)
        ladder = CoeffLadder(order=3, maximum=30.0, size=4)
        stack = build_stack(signal, ladder)
        for m, coeff in enumerate(ladder.values):
            row = fft_amplitude(signal.samples * compensation_exponent(default_grid, 3, coeff))
            assert np.allclose(stack.rows[m], row)

    def test_matched_row_is_transform_limited(self, mirror_signal):
        """The row whose coefficient equals the interface's a2 restores the unchirped peak."""
        ladder = CoeffLadder(order=2, maximum=60.0, size=5)
        stack = build_stack(mirror_signal(200.0, a2=30.0), ladder)
        reference = fft_amplitude(mirror_signal(200.0).samples)

        assert int(np.argmax(stack.rows[:, 200])) == 3
        assert stack.rows[3, 200] == pytest.approx(reference[200], rel=1e-3)
        assert fwhm(stack.rows[3], 200) == pytest.approx(fwhm(reference, 200), abs=0.2)

    def test_narrowest_row_tracks_nearest_coefficient(self, mirror_signal):
        """For a2 on a 15-point grid the narrowest row is the nearest ladder row."""
        ladder = CoeffLadder.default(2)
        hits = 0
        for a2 in np.linspace(-60.0, 60.0, 15):
            stack = build_stack(mirror_signal(200.0, a2=float(a2)), ladder)
            widths = [fwhm(row, find_peak(row, 1, 512)) for row in stack.rows]
            if abs(int(np.argmin(widths)) - ladder.nearest_row(float(a2))) <= 1:
                hits += 1
        assert hits >= 14


class TestNormalize:
    def test_minmax(self):
        assert minmax_normalize([2.0, 4.0, 3.0]).tolist() == [0.0, 1.0, 0.5]

    def test_constant_rejected(self):
        with pytest.raises(DegenerateRangeError):
            minmax_normalize(np.ones(5))

    def test_non_finite_rejected(self):
        with pytest.raises(NonFiniteError):
            minmax_normalize([0.0, np.nan, 1.0])

    def test_stack_spans_unit_interval(self, mirror_signal):
        stack = normalize_stack(build_stack(mirror_signal(200.0, a2=10.0), CoeffLadder.default(2)))
        assert stack.normalized
        assert stack.rows.min() == 0.0
        assert stack.rows.max() == 1.0

    def test_whole_stack_scaling_keeps_row_ratios(self, mirror_signal):
        raw = build_stack(mirror_signal(200.0, a2=10.0), CoeffLadder.default(2))
        normalized = normalize_stack(raw)
        low, high = raw.rows.min(), raw.rows.max()
        assert np.allclose(normalized.rows, (raw.rows - low) / (high - low))

    def test_idempotent(self, mirror_signal):
        stack = normalize_stack(build_stack(mirror_signal(200.0), CoeffLadder.default(2)))
        assert normalize_stack(stack) is stack

    def test_stack_shape_validated(self):
        with pytest.raises(ValidationError, match="ladder has 4 rows"):
            Stack(rows=np.zeros((3, 8)), ladder=CoeffLadder(order=2, maximum=1.0, size=4))
