"""NLNW weight files.

Layout (little-endian)::

    "NLNW" u16 version, u8 order,
    u8 levels, u16 base_channels, u16 rows, u16 width, u8 input_channels, u8 activation id,
    u16 layer count, f8 ladder maximum (0 when unknown)
    layer table: per layer u8 kind id, 4 x u32 weight shape (bias length = shape[0])
    parameters:  per layer f4 weight, f4 bias
    moments:     per layer f4 m_weight, f4 v_weight, f4 m_bias, f4 v_bias
    u64 step counter
"""

import logging
import struct
from pathlib import Path
from typing import cast, get_args

import numpy as np

from app.errors import BadMagicError, VersionMismatchError, WeightFormatError
from app.models.network import (
    LAYER_KIND_IDS,
    NETWORK_MAGIC,
    NETWORK_VERSION,
    LayerParams,
    NetConfig,
    NetworkState,
    OutputActivation,
)
from app.models.signal import Order
from app.nn.unet import layer_plan


logger = logging.getLogger(__name__)

HEADER_STRUCT = struct.Struct("<4sHBBHHHBBHd")
LAYER_STRUCT = struct.Struct("<B4I")
STEP_STRUCT = struct.Struct("<Q")
ACTIVATION_IDS: dict[OutputActivation, int] = {
    name: index for index, name in enumerate(get_args(OutputActivation))
}


def save_weights(state: NetworkState, path: Path) -> None:
    """Write parameters, Adam moments and step counter as float32."""
    cfg = state.config
    chunks = [
        HEADER_STRUCT.pack(
            NETWORK_MAGIC,
            NETWORK_VERSION,
            state.order,
            cfg.levels,
            cfg.base_channels,
            cfg.rows,
            cfg.width,
            cfg.input_channels,
            ACTIVATION_IDS[cfg.output_activation],
            len(state.layers),
            cfg.ladder_max or 0.0,
        ),
    ]
    chunks.extend(
        LAYER_STRUCT.pack(LAYER_KIND_IDS[layer.spec.kind], *layer.weight.shape)
        for layer in state.layers
    )
    for layer in state.layers:
        chunks.extend((layer.weight.astype("<f4").tobytes(), layer.bias.astype("<f4").tobytes()))
    for layer in state.layers:
        chunks.extend(
            moment.astype("<f4").tobytes()
            for moment in (layer.m_weight, layer.v_weight, layer.m_bias, layer.v_bias)
        )
    chunks.append(STEP_STRUCT.pack(state.step))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(b"".join(chunks))
    logger.info("Saved order-%d network (%d parameters) to %s", state.order, state.parameter_count, path)


def _read_header(data: bytes, path: Path) -> tuple[Order, NetConfig, int]:
    if data[: len(NETWORK_MAGIC)] != NETWORK_MAGIC:
        msg = f"{path} is not an NLNW weight file (bad magic)"
        raise BadMagicError(msg)
    if len(data) < HEADER_STRUCT.size:
        msg = f"{path} header is truncated"
        raise WeightFormatError(msg)
    (
        _,
        version,
        order,
        levels,
        base,
        rows,
        width,
        in_channels,
        activation,
        count,
        ladder_max,
    ) = HEADER_STRUCT.unpack_from(data)
    if version != NETWORK_VERSION:
        msg = f"{path} has weight format version {version}, expected {NETWORK_VERSION}"
        raise VersionMismatchError(msg)
    activations = {v: k for k, v in ACTIVATION_IDS.items()}
    if order not in (2, 3) or activation not in activations:
        msg = f"{path} has invalid order tag {order} or activation id {activation}"
        raise WeightFormatError(msg)
    cfg = NetConfig(
        levels=levels,
        base_channels=base,
        rows=rows,
        width=width,
        input_channels=in_channels,
        output_activation=activations[activation],
        ladder_max=ladder_max if ladder_max > 0 else None,
    )
    return cast(Order, order), cfg, count


def load_weights(path: Path) -> NetworkState:
    """Read a weight file back into a float32 NetworkState.

    The layer table is checked against the topology implied by the header; the first
    inconsistent entry is reported by index.
    """
    data = path.read_bytes()
    order, cfg, count = _read_header(data, path)
    plan = layer_plan(cfg)
    if count != len(plan):
        msg = f"layer table has {count} entries, topology needs {len(plan)}"
        raise WeightFormatError(msg, layer_index=min(count, len(plan)))

    offset = HEADER_STRUCT.size
    for index, spec in enumerate(plan):
        if offset + LAYER_STRUCT.size > len(data):
            msg = "layer table is truncated"
            raise WeightFormatError(msg, layer_index=index)
        kind_id, *shape = LAYER_STRUCT.unpack_from(data, offset)
        offset += LAYER_STRUCT.size
        if kind_id != LAYER_KIND_IDS[spec.kind] or tuple(shape) != spec.weight_shape:
            msg = (
                f"table entry (kind {kind_id}, shape {tuple(shape)}) does not match "
                f"{spec.name} (kind {LAYER_KIND_IDS[spec.kind]}, shape {spec.weight_shape})"
            )
            raise WeightFormatError(msg, layer_index=index)

    def take(shape: tuple[int, ...], index: int) -> np.ndarray:
        nonlocal offset
        size = 4 * int(np.prod(shape))
        if offset + size > len(data):
            msg = "payload is shorter than the layer table implies"
            raise WeightFormatError(msg, layer_index=index)
        array = np.frombuffer(data, dtype="<f4", count=size // 4, offset=offset)
        offset += size
        return array.reshape(shape).astype(np.float32)

    tensors = [
        (take(spec.weight_shape, i), take((spec.out_channels,), i)) for i, spec in enumerate(plan)
    ]
    moments = [
        tuple(
            take(shape, i)
            for shape in (spec.weight_shape, spec.weight_shape, (spec.out_channels,), (spec.out_channels,))
        )
        for i, spec in enumerate(plan)
    ]
    if len(data) - offset != STEP_STRUCT.size:
        msg = f"expected {STEP_STRUCT.size} trailing bytes, found {len(data) - offset}"
        raise WeightFormatError(msg, layer_index=len(plan) - 1)
    (step,) = STEP_STRUCT.unpack_from(data, offset)

    layers = [
        LayerParams(
            spec=spec,
            weight=weight,
            bias=bias,
            m_weight=m_w,
            v_weight=v_w,
            m_bias=m_b,
            v_bias=v_b,
        )
        for spec, (weight, bias), (m_w, v_w, m_b, v_b) in zip(plan, tensors, moments, strict=True)
    ]
    logger.debug("Loaded order-%d network from %s (step %d)", order, path, step)
    return NetworkState(config=cfg, order=order, layers=layers, step=step)
