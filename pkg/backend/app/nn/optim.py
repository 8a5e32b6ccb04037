"""Adam optimizer over a NetworkState."""

import numpy as np
from numpy.typing import NDArray

from app.errors import NonFiniteError, ShapeMismatchError
from app.models.network import DEFAULT_LEARNING_RATE, Gradients, NetworkState


BETA1 = 0.9
BETA2 = 0.999
EPSILON = 1e-8


def adam_update(
    param: NDArray[np.floating],
    grad: NDArray[np.floating],
    m: NDArray[np.floating],
    v: NDArray[np.floating],
    step: int,
    lr: float,
) -> None:
    """In-place bias-corrected Adam update for one tensor; ``step`` counts from 1."""
    m *= BETA1
    m += (1 - BETA1) * grad
    v *= BETA2
    v += (1 - BETA2) * grad * grad
    m_hat = m / (1 - BETA1**step)
    v_hat = v / (1 - BETA2**step)
    param -= lr * m_hat / (np.sqrt(v_hat) + EPSILON)


def adam_step(
    state: NetworkState,
    gradients: Gradients,
    lr: float = DEFAULT_LEARNING_RATE,
) -> NetworkState:
    """Apply one Adam step to every layer and advance the step counter.

    Gradients are validated before anything is touched, so a rejected step leaves the state as
    it was.
    """
    if len(gradients) != len(state.layers):
        msg = f"got gradients for {len(gradients)} layers, network has {len(state.layers)}"
        raise ShapeMismatchError(msg)
    for index, (layer, (dw, db)) in enumerate(zip(state.layers, gradients, strict=True)):
        if dw.shape != layer.weight.shape or db.shape != layer.bias.shape:
            msg = f"layer {index} gradient shapes {dw.shape}/{db.shape} do not match parameters"
            raise ShapeMismatchError(msg)
        if not (np.all(np.isfinite(dw)) and np.all(np.isfinite(db))):
            msg = f"layer {index} ({layer.spec.name}) has non-finite gradients"
            raise NonFiniteError(msg)

    step = state.step + 1
    for layer, (dw, db) in zip(state.layers, gradients, strict=True):
        adam_update(layer.weight, dw, layer.m_weight, layer.v_weight, step, lr)
        adam_update(layer.bias, db, layer.m_bias, layer.v_bias, step, lr)
    state.step = step
    return state
