"""Deterministic SVG rendering of the CSV outputs."""

import logging
from pathlib import Path
from typing import Literal

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from app.errors import DataError
from app.utils.export import read_csv


matplotlib.use("Agg")

logger = logging.getLogger(__name__)

PlotKind = Literal["line", "heatmap"]

CANVAS_INCHES = (9.6, 5.4)
CANVAS_DPI = 100
SVG_HASH_SALT = "nlrm"


def emit_plot(csv_path: Path, kind: PlotKind, svg_path: Path, title: str | None = None) -> None:
    """960x540 SVG of a CSV file, byte-identical for identical input.

    ``line``: one series per column against the row index, or a single row as one series.
    ``heatmap``: the matrix as an image, rows top to bottom.
    """
    columns, data = read_csv(csv_path)
    figure = Figure(figsize=CANVAS_INCHES, dpi=CANVAS_DPI)
    axes = figure.add_subplot()
    if kind == "line":
        series = data.T if data.shape[0] > 1 else data
        names = columns if columns is not None and data.shape[0] > 1 else None
        x = np.arange(series.shape[1])
        if names is not None and names[0] == "depth":
            x, series, names = series[0], series[1:], names[1:]
            axes.set_xlabel("depth (bins)")
        else:
            axes.set_xlabel("index")
        for index, values in enumerate(series):
            label = names[index] if names is not None else None
            axes.plot(x, values, linewidth=1.0, label=label)
        if names is not None:
            axes.legend(fontsize="small")
        axes.set_ylabel("value")
    elif kind == "heatmap":
        image = axes.imshow(data, aspect="auto", cmap="gray", interpolation="nearest")
        figure.colorbar(image, ax=axes)
        axes.set_xlabel("column")
        axes.set_ylabel("row")
    else:
        msg = f"unknown plot kind {kind!r}"
        raise DataError(msg)
    if title:
        axes.set_title(title)

    svg_path.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context({"svg.hashsalt": SVG_HASH_SALT, "svg.fonttype": "path"}):
        figure.savefig(svg_path, format="svg", metadata={"Date": None})
    logger.info("Wrote %s plot of %s to %s", kind, csv_path, svg_path)
