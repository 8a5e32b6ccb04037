"""Reproducible generation and streaming of NLDS datasets.

File layout (little-endian)::

    header   "NLDS" u16 version, u8 order, u32 count, u16 M, u16 N, u64 seed
             M x f8 ladder values, 2 x f8 bounds (a2, a3)
    record   u8 J, J x (f8 freq, f8 reflectivity, f8 a2, f8 a3)
             M*N x f4 stack (row-major), N x f4 target

A JSON manifest with the same header fields is written next to the file.
"""

import logging
import struct
from collections import Counter
from collections.abc import Iterator
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import BinaryIO, Self

import numpy as np
from numpy.typing import NDArray
from telemetry import record_metrics, run_span

from app.errors import (
    BadMagicError,
    ConfigurationError,
    TruncatedRecordError,
    VersionMismatchError,
)
from app.models.dataset import (
    DATASET_MAGIC,
    DATASET_VERSION,
    DatasetConfig,
    DatasetHeader,
    DatasetManifest,
    Sample,
)
from app.models.signal import MIN_PEAK_SEPARATION, Grid, Interface, ObjectSpec
from app.models.stack import Stack
from app.services.signal_model import ground_truth, synthesize_signal
from app.services.stack_builder import build_stack, minmax_normalize, normalize_stack
from app.utils.prng import sample_rng


logger = logging.getLogger(__name__)

HEADER_STRUCT = struct.Struct("<4sHBIHHQ")
INTERFACE_FIELDS = 4


def allocate_buckets(cfg: DatasetConfig) -> list[int]:
    """Interface count of every sample index.

    Uniform allocation gives each count the same share, the remainder going to the lowest counts;
    indices are grouped by bucket in ascending order.
    """
    low, high = cfg.interface_range
    counts = list(range(low, high + 1))
    if not cfg.uniform_allocation:
        rng = sample_rng(cfg.seed, cfg.count)
        return [int(j) for j in rng.integers(low, high + 1, size=cfg.count)]
    share, remainder = divmod(cfg.count, len(counts))
    allocation: list[int] = []
    for position, j in enumerate(counts):
        allocation.extend([j] * (share + (1 if position < remainder else 0)))
    return allocation


def draw_object(
    rng: np.random.Generator,
    cfg: DatasetConfig,
    j: int,
    *,
    random_phase: bool = False,
) -> ObjectSpec:
    """Random object with ``j`` interfaces, in ascending frequency order.

    Frequencies are uniform over the configurations of the grid's band whose neighbours are at
    least the minimum separation apart: sorted draws from the band shortened by the total gap,
    then spread by one gap per rank.
    """
    low, high = cfg.interface_range
    if not low <= j <= high:
        msg = f"interface count {j} outside {cfg.interface_range}"
        raise ConfigurationError(msg)
    grid = cfg.grid
    span = grid.f_max - grid.f_min - (j - 1) * MIN_PEAK_SEPARATION
    if span < 0:
        msg = (
            f"cannot place {j} interfaces {MIN_PEAK_SEPARATION} bins apart in "
            f"[{grid.f_min}, {grid.f_max}]"
        )
        raise ConfigurationError(msg)
    freqs = (
        grid.f_min
        + np.sort(rng.uniform(0.0, span, size=j))
        + MIN_PEAK_SEPARATION * np.arange(j, dtype=np.float64)
    )

    r_low, r_high = cfg.reflectivity_range
    # 1 - U[0, 1) lies in (0, 1], so the lower bound is excluded and the upper one reachable.
    reflectivity = r_low + (r_high - r_low) * (1.0 - rng.random(size=j))
    a2 = rng.uniform(-cfg.a2_bound, cfg.a2_bound, size=j)
    a3 = rng.uniform(-cfg.a3_bound, cfg.a3_bound, size=j)
    phase = rng.uniform(0.0, 2.0 * np.pi, size=j) if random_phase else np.zeros(j)
    return ObjectSpec(
        interfaces=[
            Interface(
                freq=float(freqs[i]),
                reflectivity=float(reflectivity[i]),
                a2=float(a2[i]),
                a3=float(a3[i]),
                phase=float(phase[i]),
            )
            for i in range(j)
        ],
    )


def make_sample(obj: ObjectSpec, cfg: DatasetConfig) -> Sample:
    """Normalized stack and normalized ground truth of an object."""
    signal = synthesize_signal(obj, cfg.grid)
    stack = normalize_stack(build_stack(signal, cfg.ladder))
    target = minmax_normalize(ground_truth(obj, cfg.grid, cfg.order))
    return Sample(object=obj, input=stack, target=target)


def _sample_at(cfg: DatasetConfig, index: int, j: int) -> Sample:
    return make_sample(draw_object(sample_rng(cfg.seed, index), cfg, j), cfg)


def _encode_record(sample: Sample) -> bytes:
    fields = np.array(
        [[i.freq, i.reflectivity, i.a2, i.a3] for i in sample.object.interfaces],
        dtype="<f8",
    )
    return b"".join(
        (
            struct.pack("<B", len(sample.object.interfaces)),
            fields.tobytes(),
            sample.input.rows.astype("<f4").tobytes(),
            sample.target.astype("<f4").tobytes(),
        ),
    )


def _encode_header(header: DatasetHeader) -> bytes:
    fixed = HEADER_STRUCT.pack(
        DATASET_MAGIC,
        header.version,
        header.order,
        header.count,
        header.rows,
        header.n_samples,
        header.seed,
    )
    ladder = np.asarray(header.ladder_values, dtype="<f8").tobytes()
    bounds = np.array([header.a2_bound, header.a3_bound], dtype="<f8").tobytes()
    return fixed + ladder + bounds


def manifest_path(path: Path) -> Path:
    return path.with_suffix(".json")


def generate(cfg: DatasetConfig, path: Path, workers: int = 1) -> DatasetManifest:
    """Generate ``cfg.count`` samples and write them to ``path`` in index order.

    Each index draws from its own PRNG stream, so the bytes do not depend on ``workers``.
    """
    allocation = allocate_buckets(cfg)
    header = DatasetHeader(
        order=cfg.order,
        count=cfg.count,
        rows=cfg.rows,
        n_samples=cfg.grid.n_samples,
        seed=cfg.seed,
        ladder_values=cfg.ladder.values,
        a2_bound=cfg.a2_bound,
        a3_bound=cfg.a3_bound,
    )
    manifest = DatasetManifest(
        **header.model_dump(),
        envelope_sigma=cfg.grid.envelope_sigma,
        interface_range=cfg.interface_range,
        bucket_counts=dict(sorted(Counter(allocation).items())),
    )

    path.parent.mkdir(parents=True, exist_ok=True)
    with run_span("dataset.generate", count=cfg.count, order=cfg.order, workers=workers) as span:
        indices = range(cfg.count)
        with path.open("wb") as handle:
            handle.write(_encode_header(header))
            if workers > 1:
                with ProcessPoolExecutor(max_workers=workers) as pool:
                    samples = pool.map(
                        _sample_at,
                        [cfg] * cfg.count,
                        indices,
                        allocation,
                        chunksize=max(1, cfg.count // (4 * workers)),
                    )
                    for sample in samples:
                        handle.write(_encode_record(sample))
            else:
                for index, j in zip(indices, allocation, strict=True):
                    handle.write(_encode_record(_sample_at(cfg, index, j)))
        record_metrics(span, {"bytes": path.stat().st_size})

    manifest_path(path).write_text(manifest.model_dump_json(indent=2), encoding="utf-8")
    logger.info("Generated %d order-%d samples into %s", cfg.count, cfg.order, path)
    return manifest


class DatasetReader:
    """Streams samples from an NLDS file without loading it whole.

    Usage::

        with DatasetReader(path) as reader:
            for sample in reader:
                ...
    """

    def __init__(self, path: Path) -> None:
        self.path = path
        self._handle: BinaryIO = path.open("rb")
        try:
            self.header = self._read_header()
        except Exception:
            self._handle.close()
            raise
        self.grid = Grid(n_samples=self.header.n_samples, envelope_sigma=self._envelope_sigma())
        self._ladder = self.header.ladder

    def _read_header(self) -> DatasetHeader:
        fixed = self._handle.read(HEADER_STRUCT.size)
        if len(fixed) < len(DATASET_MAGIC) or fixed[: len(DATASET_MAGIC)] != DATASET_MAGIC:
            msg = f"{self.path} is not an NLDS dataset (bad magic)"
            raise BadMagicError(msg)
        if len(fixed) < HEADER_STRUCT.size:
            msg = f"{self.path} header is truncated"
            raise BadMagicError(msg)
        _, version, order, count, rows, n_samples, seed = HEADER_STRUCT.unpack(fixed)
        if version != DATASET_VERSION:
            msg = f"{self.path} has dataset version {version}, expected {DATASET_VERSION}"
            raise VersionMismatchError(msg)
        tail = self._handle.read(8 * (rows + 2))
        if len(tail) < 8 * (rows + 2):
            msg = f"{self.path} header is truncated"
            raise BadMagicError(msg)
        values = np.frombuffer(tail, dtype="<f8")
        return DatasetHeader(
            version=version,
            order=order,
            count=count,
            rows=rows,
            n_samples=n_samples,
            seed=seed,
            ladder_values=values[:rows].tolist(),
            a2_bound=float(values[rows]),
            a3_bound=float(values[rows + 1]),
        )

    def _envelope_sigma(self) -> float:
        sidecar = manifest_path(self.path)
        if sidecar.exists():
            return DatasetManifest.model_validate_json(
                sidecar.read_text(encoding="utf-8"),
            ).envelope_sigma
        sigma = Grid().envelope_sigma
        logger.warning(
            "No manifest next to %s; assuming the default envelope sigma %g",
            self.path,
            sigma,
        )
        return sigma

    def _read_exact(self, size: int, index: int) -> bytes:
        data = self._handle.read(size)
        if len(data) != size:
            raise TruncatedRecordError(index)
        return data

    def _read_record(self, index: int) -> Sample:
        rows, n = self.header.rows, self.header.n_samples
        (j,) = struct.unpack("<B", self._read_exact(1, index))
        fields = np.frombuffer(self._read_exact(8 * INTERFACE_FIELDS * j, index), dtype="<f8")
        stack = np.frombuffer(self._read_exact(4 * rows * n, index), dtype="<f4")
        target = np.frombuffer(self._read_exact(4 * n, index), dtype="<f4")
        obj = ObjectSpec(
            interfaces=[
                Interface(freq=f, reflectivity=r, a2=a2, a3=a3)
                for f, r, a2, a3 in fields.reshape(j, INTERFACE_FIELDS).tolist()
            ],
        )
        return Sample(
            object=obj,
            input=Stack(rows=stack.reshape(rows, n), ladder=self._ladder, normalized=True),
            target=target,
        )

    def __iter__(self) -> Iterator[Sample]:
        for index in range(self.header.count):
            yield self._read_record(index)
        if self._handle.read(1):
            msg = (
                f"{self.path} holds data past the {self.header.count} records its header "
                "declares (truncated record count)"
            )
            raise TruncatedRecordError(self.header.count, msg)

    def close(self) -> None:
        self._handle.close()

    def __enter__(self) -> Self:
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()


def load(path: Path) -> Iterator[Sample]:
    """Stream every sample of a dataset file."""
    with DatasetReader(path) as reader:
        yield from reader


def read_header(path: Path) -> DatasetHeader:
    with DatasetReader(path) as reader:
        return reader.header


def read_arrays(
    path: Path,
) -> tuple[DatasetHeader, NDArray[np.float32], NDArray[np.float32], list[int]]:
    """Whole dataset as (header, inputs (S, 1, M, N), targets (S, N), interface counts)."""
    with DatasetReader(path) as reader:
        samples = list(reader)
        header = reader.header
    if not samples:
        return (
            header,
            np.zeros((0, 1, header.rows, header.n_samples), dtype=np.float32),
            np.zeros((0, header.n_samples), dtype=np.float32),
            [],
        )
    inputs = np.stack([s.input.rows for s in samples]).astype(np.float32)[:, None, :, :]
    targets = np.stack([s.target for s in samples]).astype(np.float32)
    return header, inputs, targets, [s.interface_count for s in samples]
