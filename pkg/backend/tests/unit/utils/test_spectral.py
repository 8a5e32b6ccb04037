"""Tests for the FFT, analytic-signal and phase primitives."""

import numpy as np
import pytest

from app.errors import ConfigurationError, NonFiniteError, ShapeMismatchError
from app.models.signal import Grid
from app.utils.peaks import find_peak, fwhm, peak_asymmetry
from app.utils.spectral import (
    amplitude,
    analytic_signal,
    compensation_exponent,
    fft,
    fft_amplitude,
    ifft,
    is_power_of_two,
    phase_of,
    unwrap_phase,
    unwrapped_phase,
)


class TestTransforms:
    """Forward and inverse DFT."""

    def test_round_trip_random_complex(self, rng):
        """ifft(fft(x)) reproduces a random complex vector."""
        x = rng.normal(size=1024) + 1j * rng.normal(size=1024)
        assert np.allclose(ifft(fft(x)), x, atol=1e-10, rtol=0)

    def test_cosine_amplitude_is_half_length(self):
        """A unit cosine at bin k puts N/2 into bins k and N-k."""
        n, k = 64, 5
        x = np.cos(2 * np.pi * k * np.arange(n) / n)
        amp = fft_amplitude(x)
        assert amp[k] == pytest.approx(n / 2)
        assert amp[n - k] == pytest.approx(n / 2)
        assert amp[k + 1] == pytest.approx(0.0, abs=1e-9)

    def test_forward_is_unnormalized(self):
        """The DC bin is the plain sum."""
        x = np.ones(16)
        assert fft(x).bins[0] == pytest.approx(16.0)
        assert len(fft(x)) == 16

    def test_parseval(self, rng):
        """Energy is preserved up to the 1/N convention."""
        x = rng.normal(size=256)
        assert np.sum(amplitude(fft(x)) ** 2) / 256 == pytest.approx(np.sum(x**2))

    def test_non_power_of_two_rejected(self):
        with pytest.raises(ShapeMismatchError, match="power of two"):
            fft(np.zeros(100))

    def test_matrix_rejected(self):
        with pytest.raises(ShapeMismatchError, match="1-D"):
            fft(np.zeros((4, 4)))

    @pytest.mark.parametrize(("n", "expected"), [(1, True), (8, True), (12, False), (0, False)])
    def test_is_power_of_two(self, n, expected):
        assert is_power_of_two(n) is expected


class TestAnalyticSignal:
    """Analytic signal and phase unwrapping."""

    def test_real_part_is_input(self, rng):
        x = rng.normal(size=128)
        assert np.allclose(np.real(analytic_signal(x)), x)

    def test_negative_frequencies_removed(self, mirror_signal):
        signal = mirror_signal(200.0)
        spectrum = np.fft.fft(analytic_signal(signal))
        n = signal.grid.n_samples
        assert np.max(np.abs(spectrum[n // 2 + 1 :])) < 1e-9 * np.max(np.abs(spectrum))

    def test_unwrapped_slope_matches_frequency(self):
        """Unwrapped phase of cos(2 pi f u) rises 2 pi f per unit u."""
        grid = Grid(n_samples=1024)
        f = 100.0
        u = grid.centered()
        phase = unwrapped_phase(analytic_signal(np.cos(2 * np.pi * f * u)))
        inner = slice(64, -64)
        slope = np.polyfit(u[inner], phase[inner], 1)[0]
        assert slope == pytest.approx(2 * np.pi * f, rel=1e-3)

    def test_unwrap_restores_ramp(self):
        ramp = 0.3 * np.arange(100)
        profile = unwrap_phase(phase_of(np.exp(1j * ramp)))
        assert profile.unwrapped
        assert np.allclose(profile.phase, ramp)

    def test_unwrap_maps_minus_pi_step_to_plus_pi(self):
        profile = unwrap_phase(PhaseProfile(phase=np.array([0.0, -np.pi, -2 * np.pi])))
        assert np.allclose(profile.phase, [0.0, np.pi, 2 * np.pi])

    def test_unwrapped_steps_in_half_open_range(self, rng):
        profile = unwrap_phase(PhaseProfile(phase=rng.uniform(-10, 10, size=200)))
        steps = np.diff(profile.phase)
        assert np.all(steps > -np.pi)
        assert np.all(steps <= np.pi + 1e-12)

    def test_unwrap_single_sample(self):
        assert unwrap_phase(PhaseProfile(phase=np.array([2.5]))).phase.tolist() == [2.5]

    def test_wrapped_phase_in_principal_range(self):
        profile = phase_of(np.exp(1j * np.linspace(0, 20, 50)))
        assert not profile.unwrapped
        assert np.all(np.abs(profile.phase) <= np.pi)


class TestCompensation:
    """Order-selective compensation exponent."""

    def test_unit_modulus(self, default_grid):
        assert np.allclose(np.abs(compensation_exponent(default_grid, 3, 12.5)), 1.0)

    def test_zero_coefficient_is_identity(self, default_grid):
        assert np.array_equal(compensation_exponent(default_grid, 2, 0.0), np.ones(1024))

    def test_invalid_order(self, default_grid):
        with pytest.raises(ConfigurationError, match="order must be 2 or 3"):
            compensation_exponent(default_grid, 4, 1.0)

    def test_non_finite_coefficient(self, default_grid):
        with pytest.raises(NonFiniteError):
            compensation_exponent(default_grid, 2, float("nan"))

    @pytest.mark.parametrize("a2", np.linspace(-60.0, 60.0, 15).tolist())
    def test_matched_order_two_restores_transform_limit(self, mirror_signal, default_grid, a2):
        """Matched compensation of the analytic tone gives the unchirped peak width."""
        reference = fft_amplitude(mirror_signal(200.0).samples)
        expected = fwhm(reference, find_peak(reference, 1, 512))

        tone = analytic_signal(mirror_signal(200.0, a2=a2))
        amp = fft_amplitude(tone * compensation_exponent(default_grid, 2, a2))
        peak = find_peak(amp, 1, 512)
        assert peak == 200
        assert fwhm(amp, peak) == pytest.approx(expected, abs=0.2)

    @pytest.mark.parametrize("a3", np.linspace(-30.0, 30.0, 15).tolist())
    def test_matched_order_three_restores_symmetry(self, mirror_signal, default_grid, a3):
        tone = analytic_signal(mirror_signal(200.0, a3=a3))
        amp = fft_amplitude(tone * compensation_exponent(default_grid, 3, a3))
        peak = find_peak(amp, 1, 512)
        assert abs(peak_asymmetry(amp, peak)) < 0.05
