"""CSV and PGM emitters shared by the CLI commands."""

import logging
from collections.abc import Mapping, Sequence
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray
from PIL import Image
from pydantic import ValidationError

from app.errors import DataError, ShapeMismatchError
from app.models.experiment import PIPELINES, BScan, DispersionRow, MirrorStudyResult
from app.models.signal import Grid, RawSignal


logger = logging.getLogger(__name__)

CSV_FORMAT = "%.17g"
PEAK_FIELDS = ("fwhm", "asymmetry", "peak_fraction")


def write_csv(path: Path, values: ArrayLike, columns: Sequence[str] | None = None) -> None:
    """Comma-separated rows at full float64 precision; a vector becomes one value per line."""
    array = np.asarray(values, dtype=np.float64)
    if array.ndim == 1:
        array = array[:, None]
    path.parent.mkdir(parents=True, exist_ok=True)
    header = ",".join(columns) if columns else ""
    np.savetxt(path, array, fmt=CSV_FORMAT, delimiter=",", header=header, comments="")
    logger.debug("Wrote %s array to %s", array.shape, path)


def read_csv(path: Path) -> tuple[list[str] | None, NDArray[np.float64]]:
    """Column names (when the first line is a header) and a 2-D float array."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        msg = f"cannot read {path}: {exc}"
        raise DataError(msg) from exc
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        msg = f"{path} is empty"
        raise DataError(msg)

    columns = None
    first = [token.strip() for token in lines[0].split(",")]
    try:
        [float(token) for token in first]
    except ValueError:
        columns = first
        lines = lines[1:]
    if not lines:
        msg = f"{path} has a header but no rows"
        raise DataError(msg)
    try:
        array = np.loadtxt(lines, delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as exc:
        msg = f"malformed CSV {path}: {exc}"
        raise DataError(msg) from exc
    if columns is not None and len(columns) != array.shape[1]:
        msg = f"{path} header names {len(columns)} columns, rows have {array.shape[1]}"
        raise DataError(msg)
    return columns, array


def read_lines_csv(path: Path, envelope_sigma: float | None = None) -> list[RawSignal]:
    """Raw lines stored one per CSV row (the generic experimental import path).

    A single-column file is one line stored one value per row.
    """
    _, array = read_csv(path)
    if array.shape[1] == 1:
        array = array.T
    sigma = {} if envelope_sigma is None else {"envelope_sigma": envelope_sigma}
    try:
        grid = Grid(n_samples=array.shape[1], **sigma)
    except ValidationError as exc:
        msg = f"{path}: lines of {array.shape[1]} samples do not form a valid grid"
        raise ShapeMismatchError(msg) from exc
    return [RawSignal(samples=row, grid=grid) for row in array]


def to_gray(image: ArrayLike) -> NDArray[np.uint8]:
    """Per-image min-max scaling to 8-bit; a constant image maps to black."""
    array = np.asarray(image, dtype=np.float64)
    low, high = float(array.min()), float(array.max())
    if high == low:
        return np.zeros(array.shape, dtype=np.uint8)
    return np.rint(255.0 * (array - low) / (high - low)).astype(np.uint8)


def write_pgm(path: Path, image: ArrayLike) -> None:
    """Binary (P5) 8-bit grayscale, row-major."""
    gray = to_gray(image)
    if gray.ndim != 2:
        msg = f"PGM export needs a 2-D image, got shape {gray.shape}"
        raise DataError(msg)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(gray).save(path, format="PPM")


def mirror_study_table(result: MirrorStudyResult) -> tuple[list[str], NDArray[np.float64]]:
    """Depth column then ``<pipeline>_<metric>`` columns; absent pipelines are NaN."""
    columns = ["depth"]
    data = [[row.depth for row in result.rows]]
    for pipeline in PIPELINES:
        for field in PEAK_FIELDS:
            columns.append(f"{pipeline}_{field}")
            data.append(result.column(pipeline, field))
    return columns, np.asarray(data, dtype=np.float64).T


def write_mirror_study(result: MirrorStudyResult, path: Path) -> None:
    columns, table = mirror_study_table(result)
    write_csv(path, table, columns)


def write_dispersion_rows(rows: Sequence[DispersionRow], path: Path) -> None:
    columns = ["object_a2"]
    for name in ("raw", "baseline", "net1"):
        columns.extend(f"{name}_{field}" for field in PEAK_FIELDS)
    table = []
    for row in rows:
        values = [row.object_a2]
        for metrics in (row.raw, row.baseline, row.net1):
            values.extend(
                float("nan") if metrics is None else float(getattr(metrics, field))
                for field in PEAK_FIELDS
            )
        table.append(values)
    write_csv(path, table, columns)


def write_bscan(bscan: BScan, csv_path: Path, pgm_path: Path | None = None) -> None:
    write_csv(csv_path, bscan.lines)
    if pgm_path is not None:
        write_pgm(pgm_path, bscan.lines)


def write_named_vectors(path: Path, vectors: Mapping[str, ArrayLike]) -> None:
    """Equal-length vectors side by side under their names."""
    names = list(vectors)
    table = np.column_stack([np.asarray(vectors[name], dtype=np.float64) for name in names])
    write_csv(path, table, names)
