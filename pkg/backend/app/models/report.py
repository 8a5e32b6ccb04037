"""GoF evaluation reports broken down by interface count."""

from pydantic import BaseModel, Field, computed_field

from app.models.signal import Order


class GofBucket(BaseModel):
    """One interface-count row of the breakdown table, at one threshold."""

    interface_count: int
    below_95: int = Field(ge=0)
    size: int = Field(ge=0)
    mean_gof: float | None = None
    gof_min: float | None = None
    gof_q1: float | None = None
    gof_median: float | None = None
    gof_q3: float | None = None
    gof_max: float | None = None

    @computed_field  # type: ignore[prop-decorator]
    @property
    def percent_below(self) -> float:
        return 100.0 * self.below_95 / self.size if self.size else 0.0


class GofTable(BaseModel):
    """Breakdown at a single threshold plus its totals row."""

    threshold: float
    buckets: list[GofBucket]
    mean_gof: float

    @computed_field  # type: ignore[prop-decorator]
    @property
    def total_below_95(self) -> int:
        return sum(b.below_95 for b in self.buckets)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def total_size(self) -> int:
        return sum(b.size for b in self.buckets)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def total_percent_below(self) -> float:
        return 100.0 * self.total_below_95 / self.total_size if self.total_size else 0.0


class GofReport(BaseModel):
    """Per-sample GoF and per-interface-count aggregation at every threshold.

    ``sample_gof`` is keyed by threshold (``f"{t:g}"``) and aligned with ``interface_counts``.
    """

    order: Order
    network_order: Order | None = None
    primary_threshold: float
    interface_counts: list[int]
    sample_gof: dict[str, list[float]]
    tables: dict[str, GofTable]
    warnings: list[str] = Field(default_factory=list)

    @property
    def primary(self) -> GofTable:
        return self.tables[f"{self.primary_threshold:g}"]

    @property
    def mean_gof(self) -> float:
        return self.primary.mean_gof
