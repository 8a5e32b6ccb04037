"""Pydantic field types for numpy arrays."""

from typing import Annotated, Any

import numpy as np
from numpy.typing import NDArray
from pydantic import PlainSerializer, PlainValidator


def _as_frozen_float_array(value: Any) -> NDArray[np.float64]:
    """Copy any array-like into a read-only float64 array."""
    array = np.array(value, dtype=np.float64)
    array.setflags(write=False)
    return array


def _to_list(value: NDArray[Any]) -> list[Any]:
    return list(value.tolist())


# Read-only float64 array; serializes to nested JSON lists at full precision.
FloatArray = Annotated[
    np.ndarray,
    PlainValidator(_as_frozen_float_array),
    PlainSerializer(_to_list, return_type=list),
]
