"""Forward and backward passes of the network's layer kinds.

All tensors are (batch, channels, height, width). Each ``*_forward`` returns the output and
whatever its ``*_backward`` needs; backward functions return gradients in the same order as the
forward inputs.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from numpy.typing import NDArray
from scipy.special import expit

from app.errors import ShapeMismatchError


Array = NDArray[np.floating]


def _pad(x: Array, pad: int) -> Array:
    if pad == 0:
        return x
    return np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))


def conv2d_forward(x: Array, weight: Array, bias: Array) -> Array:
    """Same-padded stride-1 convolution (cross-correlation) with odd kernel size."""
    out_channels, in_channels, k, _ = weight.shape
    if x.shape[1] != in_channels:
        msg = f"conv expects {in_channels} input channels, got {x.shape[1]}"
        raise ShapeMismatchError(msg)
    windows = sliding_window_view(_pad(x, k // 2), (k, k), axis=(2, 3))
    # (B, C, H, W, k, k) x (O, C, k, k) -> (B, H, W, O)
    out = np.tensordot(windows, weight, axes=([1, 4, 5], [1, 2, 3]))
    out = out.transpose(0, 3, 1, 2) + bias[None, :, None, None]
    return np.ascontiguousarray(out, dtype=x.dtype)


def conv2d_backward(dout: Array, x: Array, weight: Array) -> tuple[Array, Array, Array]:
    """Gradients (dx, dweight, dbias) of ``conv2d_forward``."""
    _, _, k, _ = weight.shape
    pad = k // 2
    _, _, height, width = x.shape
    windows = sliding_window_view(_pad(x, pad), (k, k), axis=(2, 3))
    dweight = np.tensordot(dout, windows, axes=([0, 2, 3], [0, 2, 3]))
    dbias = dout.sum(axis=(0, 2, 3))

    dx_padded = np.zeros(
        (x.shape[0], x.shape[1], height + 2 * pad, width + 2 * pad),
        dtype=x.dtype,
    )
    for i in range(k):
        for j in range(k):
            # (O, C) x (B, O, H, W) -> (C, B, H, W)
            tap = np.tensordot(weight[:, :, i, j], dout, axes=([0], [1]))
            dx_padded[:, :, i : i + height, j : j + width] += tap.transpose(1, 0, 2, 3)
    dx = dx_padded[:, :, pad : pad + height, pad : pad + width]
    return (
        np.ascontiguousarray(dx),
        dweight.astype(weight.dtype, copy=False),
        dbias.astype(weight.dtype, copy=False),
    )


def relu_forward(z: Array) -> Array:
    return np.maximum(z, 0)


def relu_backward(dout: Array, z: Array) -> Array:
    """Subgradient 0 at z == 0."""
    return dout * (z > 0)


def maxpool2x2_forward(x: Array) -> tuple[Array, NDArray[np.intp]]:
    """2x2 max-pool; returns the output and the winning position (0..3, scan order)."""
    b, c, h, w = x.shape
    if h % 2 or w % 2:
        msg = f"max-pool needs even height and width, got {h}x{w}"
        raise ShapeMismatchError(msg)
    blocks = x.reshape(b, c, h // 2, 2, w // 2, 2).transpose(0, 1, 2, 4, 3, 5)
    blocks = blocks.reshape(b, c, h // 2, w // 2, 4)
    index = np.argmax(blocks, axis=-1)
    out = np.take_along_axis(blocks, index[..., None], axis=-1)[..., 0]
    return out, index


def maxpool2x2_backward(dout: Array, index: NDArray[np.intp]) -> Array:
    """Routes each gradient to the first maximal element of its window."""
    b, c, h2, w2 = dout.shape
    blocks = np.zeros((b, c, h2, w2, 4), dtype=dout.dtype)
    np.put_along_axis(blocks, index[..., None], dout[..., None], axis=-1)
    blocks = blocks.reshape(b, c, h2, w2, 2, 2).transpose(0, 1, 2, 4, 3, 5)
    return blocks.reshape(b, c, 2 * h2, 2 * w2)


def rowmax_forward(x: Array) -> tuple[Array, NDArray[np.intp]]:
    """Max over the whole row axis: (B, C, H, W) -> (B, C, 1, W)."""
    index = np.argmax(x, axis=2)
    out = np.take_along_axis(x, index[:, :, None, :], axis=2)
    return out, index


def rowmax_backward(dout: Array, index: NDArray[np.intp], height: int) -> Array:
    b, c, _, w = dout.shape
    dx = np.zeros((b, c, height, w), dtype=dout.dtype)
    np.put_along_axis(dx, index[:, :, None, :], dout, axis=2)
    return dx


def upsample2x_forward(x: Array) -> Array:
    """Nearest-neighbour x2 upsampling in both spatial axes."""
    return x.repeat(2, axis=2).repeat(2, axis=3)


def upsample2x_backward(dout: Array) -> Array:
    b, c, h, w = dout.shape
    return dout.reshape(b, c, h // 2, 2, w // 2, 2).sum(axis=(3, 5))


def concat_forward(skip: Array, up: Array) -> Array:
    return np.concatenate([skip, up], axis=1)


def concat_backward(dout: Array, skip_channels: int) -> tuple[Array, Array]:
    return dout[:, :skip_channels], dout[:, skip_channels:]


def sigmoid_forward(z: Array) -> Array:
    return expit(z)


def sigmoid_backward(dout: Array, out: Array) -> Array:
    return dout * out * (1 - out)


def clamp_forward(z: Array) -> Array:
    return np.clip(z, 0, 1)


def clamp_backward(dout: Array, z: Array) -> Array:
    return dout * ((z > 0) & (z < 1))


def mae_loss(pred: Array, target: Array) -> float:
    """Mean absolute error over every element."""
    if pred.shape != target.shape:
        msg = f"mae_loss needs equal shapes, got {pred.shape} and {target.shape}"
        raise ShapeMismatchError(msg)
    return float(np.mean(np.abs(pred - target)))


def mae_backward(pred: Array, target: Array, scale: float = 1.0) -> Array:
    """Gradient of ``scale * mae_loss``; subgradient 0 where pred == target."""
    return (scale / pred.size) * np.sign(pred - target).astype(pred.dtype)
