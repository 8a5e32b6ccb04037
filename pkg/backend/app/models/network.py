"""Network topology, parameter state and training records."""

import copy
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.models.signal import Order


NETWORK_MAGIC = b"NLNW"
NETWORK_VERSION = 1

DEFAULT_LEARNING_RATE = 2e-4
DEFAULT_BATCH_SIZE = 8
DEFAULT_EPOCHS = 30
DEFAULT_THRESHOLDS = (0.01, 0.001)

OutputActivation = Literal["sigmoid", "clamp"]
LayerKind = Literal["conv3x3", "conv1x1"]
Precision = Literal["float32", "float64"]

LAYER_KIND_IDS: dict[LayerKind, int] = {"conv3x3": 1, "conv1x1": 2}
KERNEL_SIZES: dict[LayerKind, int] = {"conv3x3": 3, "conv1x1": 1}


class NetConfig(BaseModel):
    """U-Net variant reducing an M x N stack to one N-vector."""

    model_config = ConfigDict(frozen=True)

    levels: int = Field(default=3, ge=1, le=6)
    base_channels: int = Field(default=16, ge=1)
    rows: int = Field(default=32, ge=1)
    width: int = Field(default=1024, ge=1)
    input_channels: int = Field(default=1, ge=1)
    output_activation: OutputActivation = "sigmoid"
    precision: Precision = "float32"
    # Compensation ladder maximum the network was trained on; None when unknown.
    ladder_max: float | None = Field(default=None, gt=0, allow_inf_nan=False)

    @model_validator(mode="after")
    def validate_divisibility(self) -> "NetConfig":
        step = 2**self.levels
        if self.rows % step or self.width % step:
            msg = (
                f"rows ({self.rows}) and width ({self.width}) must be divisible by "
                f"2**levels = {step}"
            )
            raise ValueError(msg)
        return self

    @classmethod
    def full(cls) -> "NetConfig":
        return cls()

    @classmethod
    def toy(cls) -> "NetConfig":
        """Desk-scale network for 16 x 256 stacks."""
        return cls(base_channels=8, rows=16, width=256)

    @property
    def dtype(self) -> type[np.floating]:
        return np.float32 if self.precision == "float32" else np.float64

    def channels(self, level: int) -> int:
        return self.base_channels * 2**level


@dataclass(frozen=True, slots=True)
class LayerSpec:
    """One convolution in forward order."""

    name: str
    kind: LayerKind
    in_channels: int
    out_channels: int

    @property
    def kernel(self) -> int:
        return KERNEL_SIZES[self.kind]

    @property
    def weight_shape(self) -> tuple[int, int, int, int]:
        return (self.out_channels, self.in_channels, self.kernel, self.kernel)

    @property
    def parameter_count(self) -> int:
        out, inp, k, _ = self.weight_shape
        return out * inp * k * k + out


@dataclass
class LayerParams:
    """Parameters of one layer and their Adam moments."""

    spec: LayerSpec
    weight: NDArray[np.floating]
    bias: NDArray[np.floating]
    m_weight: NDArray[np.floating]
    v_weight: NDArray[np.floating]
    m_bias: NDArray[np.floating]
    v_bias: NDArray[np.floating]

    @classmethod
    def create(
        cls,
        spec: LayerSpec,
        weight: NDArray[np.floating],
        bias: NDArray[np.floating],
    ) -> "LayerParams":
        return cls(
            spec=spec,
            weight=weight,
            bias=bias,
            m_weight=np.zeros_like(weight),
            v_weight=np.zeros_like(weight),
            m_bias=np.zeros_like(bias),
            v_bias=np.zeros_like(bias),
        )


@dataclass
class NetworkState:
    """Topology, parameters, optimizer moments and step counter of one network.

    ``order`` tags the nonlinearity the network removes (2 or 3).
    """

    config: NetConfig
    order: Order
    layers: list[LayerParams]
    step: int = 0

    @property
    def parameter_count(self) -> int:
        return sum(layer.weight.size + layer.bias.size for layer in self.layers)

    def clone(self) -> "NetworkState":
        return copy.deepcopy(self)


# Per-layer (weight gradient, bias gradient), aligned with NetworkState.layers.
Gradients = list[tuple[NDArray[np.floating], NDArray[np.floating]]]


class TrainConfig(BaseModel):
    """Optimization settings of one training run."""

    model_config = ConfigDict(frozen=True)

    epochs: int = Field(default=DEFAULT_EPOCHS, ge=0)
    batch_size: int = Field(default=DEFAULT_BATCH_SIZE, ge=1)
    learning_rate: float = Field(default=DEFAULT_LEARNING_RATE, gt=0, allow_inf_nan=False)
    seed: int = Field(default=0, ge=0)
    thresholds: tuple[float, ...] = Field(default=DEFAULT_THRESHOLDS, min_length=1)
    primary_threshold: float = Field(default=DEFAULT_THRESHOLDS[0], gt=0)

    @model_validator(mode="after")
    def validate_primary(self) -> "TrainConfig":
        if self.primary_threshold not in self.thresholds:
            msg = f"primary_threshold {self.primary_threshold} not in thresholds {self.thresholds}"
            raise ValueError(msg)
        if any(t <= 0 for t in self.thresholds):
            msg = f"thresholds must be positive, got {self.thresholds}"
            raise ValueError(msg)
        return self


def threshold_key(threshold: float) -> str:
    """Stable dictionary key for a GoF threshold."""
    return f"{threshold:g}"


class EpochRecord(BaseModel):
    epoch: int
    train_mae: float
    val_mae: float
    val_gof: dict[str, float] = Field(default_factory=dict)


class TrainReport(BaseModel):
    """Per-epoch losses and validation GoF; ``best_epoch`` indexes ``epochs`` (0-based)."""

    order: Order
    primary_threshold: float
    thresholds: list[float]
    epochs: list[EpochRecord] = Field(default_factory=list)
    best_epoch: int | None = None
    best_val_mae_epoch: int | None = None
    steps: int = 0
    parameter_count: int = 0
    warnings: list[str] = Field(default_factory=list)
