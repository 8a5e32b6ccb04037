"""U-Net variant mapping an (M x N) compensation stack to a 1-D amplitude line.

Topology for ``levels = L`` and ``base_channels = c``:

* encoder level i: two 3x3 conv + ReLU to ``c * 2**i`` channels, then 2x2 max-pool
* bottleneck: two 3x3 conv + ReLU to ``c * 2**L`` channels
* decoder level i (L-1 down to 0): x2 nearest upsample, 3x3 conv + ReLU to ``c * 2**i``,
  concatenation [skip, upsampled], two 3x3 conv + ReLU
* head: max over the full row axis, 1x1 conv to one channel, sigmoid (or clamp)
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from app.errors import NonFiniteError, ShapeMismatchError
from app.models.network import (
    Gradients,
    LayerParams,
    LayerSpec,
    NetConfig,
    NetworkState,
)
from app.models.signal import Order
from app.nn import layers
from app.utils.prng import run_rng


logger = logging.getLogger(__name__)

Array = NDArray[np.floating]


def layer_plan(cfg: NetConfig) -> list[LayerSpec]:
    """Every convolution of the network in forward order."""
    plan: list[LayerSpec] = []
    channels = cfg.input_channels
    for level in range(cfg.levels):
        out = cfg.channels(level)
        plan.append(LayerSpec(f"enc{level}.conv_a", "conv3x3", channels, out))
        plan.append(LayerSpec(f"enc{level}.conv_b", "conv3x3", out, out))
        channels = out
    bottom = cfg.channels(cfg.levels)
    plan.append(LayerSpec("bottleneck.conv_a", "conv3x3", channels, bottom))
    plan.append(LayerSpec("bottleneck.conv_b", "conv3x3", bottom, bottom))
    channels = bottom
    for level in reversed(range(cfg.levels)):
        out = cfg.channels(level)
        plan.append(LayerSpec(f"dec{level}.up_conv", "conv3x3", channels, out))
        plan.append(LayerSpec(f"dec{level}.conv_a", "conv3x3", 2 * out, out))
        plan.append(LayerSpec(f"dec{level}.conv_b", "conv3x3", out, out))
        channels = out
    plan.append(LayerSpec("head.conv", "conv1x1", channels, 1))
    return plan


def parameter_count(cfg: NetConfig) -> int:
    return sum(spec.parameter_count for spec in layer_plan(cfg))


def init_state(cfg: NetConfig, order: Order, seed: int = 0) -> NetworkState:
    """He-uniform weights (bound ``sqrt(6 / fan_in)``), zero biases, zero moments."""
    rng = run_rng(seed)
    dtype = cfg.dtype
    params = []
    for spec in layer_plan(cfg):
        fan_in = spec.in_channels * spec.kernel * spec.kernel
        bound = np.sqrt(6.0 / fan_in)
        weight = rng.uniform(-bound, bound, size=spec.weight_shape).astype(dtype)
        bias = np.zeros(spec.out_channels, dtype=dtype)
        params.append(LayerParams.create(spec, weight, bias))
    state = NetworkState(config=cfg, order=order, layers=params)
    logger.debug("Initialized order-%d network with %d parameters", order, state.parameter_count)
    return state


def zero_state(cfg: NetConfig, order: Order) -> NetworkState:
    """All parameters zero; the sigmoid head then outputs 0.5 everywhere."""
    return NetworkState(
        config=cfg,
        order=order,
        layers=[
            LayerParams.create(
                spec,
                np.zeros(spec.weight_shape, dtype=cfg.dtype),
                np.zeros(spec.out_channels, dtype=cfg.dtype),
            )
            for spec in layer_plan(cfg)
        ],
    )


@dataclass
class ForwardCache:
    """Intermediate values needed by ``backward``."""

    conv_inputs: list[Array] = field(default_factory=list)
    pre_activations: list[Array] = field(default_factory=list)
    pool_indices: list[NDArray[np.intp]] = field(default_factory=list)
    rowmax_index: NDArray[np.intp] | None = None
    head_pre_activation: Array | None = None
    output: Array | None = None

    def activation_pattern(self) -> list[NDArray[np.generic]]:
        """ReLU masks and max-pool winners; identical patterns mean no kink was crossed."""
        pattern: list[NDArray[np.generic]] = [z > 0 for z in self.pre_activations]
        pattern.extend(self.pool_indices)
        if self.rowmax_index is not None:
            pattern.append(self.rowmax_index)
        return pattern


def _check_input(state: NetworkState, x: Array) -> Array:
    cfg = state.config
    expected = (cfg.input_channels, cfg.rows, cfg.width)
    if x.ndim != 4 or x.shape[1:] != expected or x.shape[0] == 0:
        msg = f"network expects input (B, {', '.join(map(str, expected))}), got {x.shape}"
        raise ShapeMismatchError(msg)
    return np.asarray(x, dtype=cfg.dtype)


def check_finite(state: NetworkState) -> None:
    for index, layer in enumerate(state.layers):
        if not (np.all(np.isfinite(layer.weight)) and np.all(np.isfinite(layer.bias))):
            msg = f"layer {index} ({layer.spec.name}) has non-finite parameters"
            raise NonFiniteError(msg)


def forward_with_cache(state: NetworkState, x: Array) -> tuple[Array, ForwardCache]:
    """Output (B, width) in [0, 1] plus the cache for ``backward``."""
    check_finite(state)
    h = _check_input(state, x)
    cfg = state.config
    cache = ForwardCache()
    params = iter(state.layers)

    def conv_relu(inp: Array) -> Array:
        layer = next(params)
        z = layers.conv2d_forward(inp, layer.weight, layer.bias)
        cache.conv_inputs.append(inp)
        cache.pre_activations.append(z)
        return layers.relu_forward(z)

    skips = []
    for _ in range(cfg.levels):
        h = conv_relu(conv_relu(h))
        skips.append(h)
        h, index = layers.maxpool2x2_forward(h)
        cache.pool_indices.append(index)
    h = conv_relu(conv_relu(h))
    for level in reversed(range(cfg.levels)):
        up = conv_relu(layers.upsample2x_forward(h))
        h = conv_relu(conv_relu(layers.concat_forward(skips[level], up)))

    collapsed, cache.rowmax_index = layers.rowmax_forward(h)
    head = next(params)
    cache.conv_inputs.append(collapsed)
    z = layers.conv2d_forward(collapsed, head.weight, head.bias)
    cache.head_pre_activation = z
    if cfg.output_activation == "sigmoid":
        out = layers.sigmoid_forward(z)
    else:
        out = layers.clamp_forward(z)
    cache.output = out
    return out[:, 0, 0, :], cache


def forward(state: NetworkState, x: Array) -> Array:
    """Network output (B, width); deterministic."""
    out, _ = forward_with_cache(state, x)
    return out


def predict(state: NetworkState, inputs: Array, batch_size: int = 8) -> Array:
    """Forward pass over many samples in fixed-size batches, in input order."""
    if inputs.shape[0] == 0:
        return np.zeros((0, state.config.width), dtype=state.config.dtype)
    outputs = [
        forward(state, inputs[start : start + batch_size])
        for start in range(0, inputs.shape[0], batch_size)
    ]
    return np.concatenate(outputs, axis=0)


def backward_from_output(
    state: NetworkState,
    cache: ForwardCache,
    dout: Array,
) -> Gradients:
    """Reverse pass given dLoss/dOutput of shape (B, width)."""
    cfg = state.config
    assert cache.output is not None
    assert cache.head_pre_activation is not None
    assert cache.rowmax_index is not None

    grads: Gradients = [None] * len(state.layers)  # type: ignore[list-item]
    index = len(state.layers) - 1

    dz = dout[:, None, None, :].astype(cfg.dtype, copy=False)
    if cfg.output_activation == "sigmoid":
        dz = layers.sigmoid_backward(dz, cache.output)
    else:
        dz = layers.clamp_backward(dz, cache.head_pre_activation)
    d_collapsed, dw, db = layers.conv2d_backward(dz, cache.conv_inputs[index], state.layers[index].weight)
    grads[index] = (dw, db)
    dh = layers.rowmax_backward(d_collapsed, cache.rowmax_index, cfg.rows)

    def conv_relu_back(d: Array) -> Array:
        nonlocal index
        index -= 1
        dz = layers.relu_backward(d, cache.pre_activations[index])
        dx, dw, db = layers.conv2d_backward(dz, cache.conv_inputs[index], state.layers[index].weight)
        grads[index] = (dw, db)
        return dx

    skip_grads: dict[int, Array] = {}
    for level in range(cfg.levels):
        d_cat = conv_relu_back(conv_relu_back(dh))
        d_skip, d_up = layers.concat_backward(d_cat, cfg.channels(level))
        skip_grads[level] = d_skip
        dh = layers.upsample2x_backward(conv_relu_back(d_up))
    dh = conv_relu_back(conv_relu_back(dh))
    for level in reversed(range(cfg.levels)):
        dh = layers.maxpool2x2_backward(dh, cache.pool_indices[level]) + skip_grads[level]
        dh = conv_relu_back(conv_relu_back(dh))
    return grads


def backward(
    state: NetworkState,
    x: Array,
    target: Array,
    loss_scale: float = 1.0,
) -> tuple[float, Gradients]:
    """``loss_scale * mae_loss(forward(x), target)`` and its exact gradients."""
    pred, cache = forward_with_cache(state, x)
    target = np.asarray(target, dtype=state.config.dtype)
    loss = loss_scale * layers.mae_loss(pred, target)
    dout = layers.mae_backward(pred, target, scale=loss_scale)
    return loss, backward_from_output(state, cache, dout)
