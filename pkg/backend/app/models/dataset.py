"""Dataset configuration, samples and the binary file header."""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.models.arrays import FloatArray
from app.models.signal import MAX_INTERFACES, Grid, ObjectSpec, Order
from app.models.stack import DEFAULT_A2_MAX, DEFAULT_A3_MAX, DEFAULT_ROWS, CoeffLadder, Stack
from app.utils.prng import MAX_SEED


DATASET_MAGIC = b"NLDS"
DATASET_VERSION = 1
MIN_DATASET_INTERFACES = 2

# Desk-scale defaults: 11 interface-count buckets x 20 for validation and test.
DEFAULT_TRAIN_COUNT = 2000
DEFAULT_EVAL_COUNT = 220


class DatasetConfig(BaseModel):
    """Everything that determines a generated dataset's bytes."""

    model_config = ConfigDict(frozen=True)

    count: int = Field(default=DEFAULT_TRAIN_COUNT, gt=0)
    order: Order = 2
    seed: int = Field(default=0, ge=0, le=MAX_SEED)
    grid: Grid = Field(default_factory=Grid)
    interface_range: tuple[int, int] = (MIN_DATASET_INTERFACES, MAX_INTERFACES)
    reflectivity_range: tuple[float, float] = (0.0, 1.0)
    a2_bound: float = Field(default=DEFAULT_A2_MAX, ge=0, allow_inf_nan=False)
    a3_bound: float = Field(default=DEFAULT_A3_MAX, ge=0, allow_inf_nan=False)
    rows: int = Field(default=DEFAULT_ROWS, ge=2)
    ladder_max: float | None = Field(
        default=None,
        gt=0,
        description="Ladder maximum in radians; defaults to the bound of the dataset's order",
    )
    uniform_allocation: bool = True

    @model_validator(mode="after")
    def validate_ranges(self) -> "DatasetConfig":
        low, high = self.interface_range
        if not MIN_DATASET_INTERFACES <= low <= high <= MAX_INTERFACES:
            msg = (
                f"interface_range must lie within [{MIN_DATASET_INTERFACES}, "
                f"{MAX_INTERFACES}], got {self.interface_range}"
            )
            raise ValueError(msg)
        r_low, r_high = self.reflectivity_range
        if not 0.0 <= r_low < r_high <= 1.0:
            msg = f"reflectivity_range must satisfy 0 <= low < high <= 1, got {self.reflectivity_range}"
            raise ValueError(msg)
        if self.uniform_allocation and self.count < self.bucket_count:
            msg = (
                f"uniform allocation needs count >= {self.bucket_count} "
                f"(one per interface count), got {self.count}"
            )
            raise ValueError(msg)
        if self.ladder.maximum < self.order_bound:
            msg = (
                f"ladder maximum {self.ladder.maximum} does not cover the order-{self.order} "
                f"bound {self.order_bound}"
            )
            raise ValueError(msg)
        return self

    @property
    def bucket_count(self) -> int:
        low, high = self.interface_range
        return high - low + 1

    @property
    def order_bound(self) -> float:
        return self.a2_bound if self.order == 2 else self.a3_bound

    @property
    def ladder(self) -> CoeffLadder:
        maximum = self.ladder_max if self.ladder_max is not None else self.order_bound
        return CoeffLadder(order=self.order, maximum=maximum, size=self.rows)


class Sample(BaseModel):
    """One (object, normalized stack, normalized target) triple."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    object: ObjectSpec
    input: Stack
    target: FloatArray

    @property
    def interface_count(self) -> int:
        return len(self.object.interfaces)


class DatasetHeader(BaseModel):
    """Fixed-size header of an NLDS file."""

    model_config = ConfigDict(frozen=True)

    version: int = DATASET_VERSION
    order: Order
    count: int
    rows: int
    n_samples: int
    seed: int
    ladder_values: list[float]
    a2_bound: float
    a3_bound: float

    @property
    def ladder(self) -> CoeffLadder:
        return CoeffLadder(order=self.order, maximum=self.ladder_values[-1], size=self.rows)


class DatasetManifest(DatasetHeader):
    """Human-readable JSON sidecar mirroring the header."""

    magic: str = DATASET_MAGIC.decode("ascii")
    envelope_sigma: float
    interface_range: tuple[int, int]
    normalization: Literal["per-sample"] = "per-sample"
    storage: Literal["float32-le"] = "float32-le"
    bucket_counts: dict[int, int]
