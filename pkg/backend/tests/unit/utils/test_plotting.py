"""Tests for SVG rendering."""

import pytest

from app.errors import DataError
from app.utils.export import write_csv
from app.utils.plotting import emit_plot


@pytest.mark.parametrize("kind", ["line", "heatmap"])
def test_byte_identical_reruns(tmp_path, rng, kind):
    csv_path = tmp_path / "data.csv"
    write_csv(csv_path, rng.random((8, 16)))
    first, second = tmp_path / "a.svg", tmp_path / "b.svg"
    emit_plot(csv_path, kind, first, title="stack")
    emit_plot(csv_path, kind, second, title="stack")
    assert first.read_bytes() == second.read_bytes()
    assert b"<svg" in first.read_bytes()


def test_depth_column_is_x_axis(tmp_path):
    csv_path = tmp_path / "study.csv"
    write_csv(csv_path, [[40.0, 3.0], [80.0, 4.0]], ["depth", "raw_fwhm"])
    svg = tmp_path / "study.svg"
    emit_plot(csv_path, "line", svg)
    assert svg.stat().st_size > 0


def test_unknown_kind(tmp_path):
    csv_path = tmp_path / "data.csv"
    write_csv(csv_path, [1.0, 2.0])
    with pytest.raises(DataError, match="unknown plot kind"):
        emit_plot(csv_path, "scatter", tmp_path / "x.svg")  # type: ignore[arg-type]
