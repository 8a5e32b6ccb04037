"""Tests for the layer forward and backward passes."""

import numpy as np
import pytest

from app.errors import ShapeMismatchError
from app.nn import layers


def _naive_conv(x, weight, bias):
    out_channels, _, k, _ = weight.shape
    pad = k // 2
    padded = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    b, _, h, w = x.shape
    out = np.zeros((b, out_channels, h, w))
    for n in range(b):
        for o in range(out_channels):
            for i in range(h):
                for j in range(w):
                    out[n, o, i, j] = np.sum(padded[n, :, i : i + k, j : j + k] * weight[o]) + bias[o]
    return out


def _numeric_gradient(f, array, eps=1e-6):
    grad = np.zeros_like(array)
    flat = array.reshape(-1)
    for index in range(flat.size):
        saved = flat[index]
        flat[index] = saved + eps
        plus = f()
        flat[index] = saved - eps
        minus = f()
        flat[index] = saved
        grad.reshape(-1)[index] = (plus - minus) / (2 * eps)
    return grad


class TestConv:
    """Same-padded convolution."""

    @pytest.mark.parametrize("k", [1, 3])
    def test_forward_matches_loops(self, rng, k):
        x = rng.normal(size=(2, 2, 4, 5))
        weight = rng.normal(size=(3, 2, k, k))
        bias = rng.normal(size=3)
        assert np.allclose(layers.conv2d_forward(x, weight, bias), _naive_conv(x, weight, bias))

    def test_backward_matches_finite_differences(self, rng):
        x = rng.normal(size=(2, 2, 4, 5))
        weight = rng.normal(size=(3, 2, 3, 3))
        bias = rng.normal(size=3)
        probe = rng.normal(size=(2, 3, 4, 5))

        def loss():
            return float(np.sum(layers.conv2d_forward(x, weight, bias) * probe))

        dx, dweight, dbias = layers.conv2d_backward(probe, x, weight)
        assert np.allclose(dx, _numeric_gradient(loss, x), atol=1e-6)
        assert np.allclose(dweight, _numeric_gradient(loss, weight), atol=1e-6)
        assert np.allclose(dbias, _numeric_gradient(loss, bias), atol=1e-6)

    def test_channel_mismatch(self, rng):
        with pytest.raises(ShapeMismatchError, match="input channels"):
            layers.conv2d_forward(np.zeros((1, 3, 4, 4)), np.zeros((2, 2, 3, 3)), np.zeros(2))


class TestPooling:
    """Max-pool, row max and upsampling."""

    def test_maxpool_forward_and_routing(self, rng):
        x = rng.permutation(32).astype(np.float64).reshape(1, 2, 4, 4)
        out, index = layers.maxpool2x2_forward(x)
        assert out.shape == (1, 2, 2, 2)
        assert out[0, 0, 0, 0] == x[0, 0, :2, :2].max()

        dx = layers.maxpool2x2_backward(np.ones_like(out), index)
        assert dx.sum() == out.size
        assert np.array_equal(dx > 0, x == np.repeat(np.repeat(out, 2, axis=2), 2, axis=3))

    def test_maxpool_needs_even_sizes(self):
        with pytest.raises(ShapeMismatchError, match="even height and width"):
            layers.maxpool2x2_forward(np.zeros((1, 1, 3, 4)))

    def test_rowmax(self, rng):
        x = rng.normal(size=(2, 3, 5, 4))
        out, index = layers.rowmax_forward(x)
        assert out.shape == (2, 3, 1, 4)
        assert np.allclose(out[:, :, 0, :], x.max(axis=2))
        dx = layers.rowmax_backward(np.ones_like(out), index, 5)
        assert np.array_equal(dx.sum(axis=2), np.ones((2, 3, 4)))

    def test_upsample_backward_is_adjoint(self, rng):
        x = rng.normal(size=(1, 2, 3, 4))
        y = rng.normal(size=(1, 2, 6, 8))
        left = np.sum(layers.upsample2x_forward(x) * y)
        right = np.sum(x * layers.upsample2x_backward(y))
        assert left == pytest.approx(right)

    def test_concat_round_trip(self, rng):
        skip, up = rng.normal(size=(1, 2, 2, 2)), rng.normal(size=(1, 3, 2, 2))
        d_skip, d_up = layers.concat_backward(layers.concat_forward(skip, up), 2)
        assert np.array_equal(d_skip, skip)
        assert np.array_equal(d_up, up)


class TestActivationsAndLoss:
    def test_relu_subgradient_zero_at_kink(self):
        z = np.array([-1.0, 0.0, 2.0])
        assert layers.relu_backward(np.ones(3), z).tolist() == [0.0, 0.0, 1.0]

    def test_sigmoid_backward(self, rng):
        z = rng.normal(size=6)
        probe = rng.normal(size=6)
        analytic = layers.sigmoid_backward(probe, layers.sigmoid_forward(z))
        numeric = _numeric_gradient(lambda: float(np.sum(layers.sigmoid_forward(z) * probe)), z)
        assert np.allclose(analytic, numeric, atol=1e-8)

    def test_clamp(self):
        z = np.array([-0.5, 0.5, 1.5])
        assert layers.clamp_forward(z).tolist() == [0.0, 0.5, 1.0]
        assert layers.clamp_backward(np.ones(3), z).tolist() == [0.0, 1.0, 0.0]

    def test_mae(self):
        pred = np.array([0.0, 1.0, 0.5, 0.2])
        target = np.array([0.5, 0.5, 0.5, 0.0])
        assert layers.mae_loss(pred, target) == pytest.approx(0.3)
        assert layers.mae_backward(pred, target).tolist() == [-0.25, 0.25, 0.0, 0.25]

    def test_mae_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            layers.mae_loss(np.zeros(2), np.zeros(3))
