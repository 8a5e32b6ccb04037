"""Tests for the CSV and PGM emitters."""

import numpy as np
import pytest

from app.errors import DataError, ShapeMismatchError
from app.models.calibration import SystemDistortion
from app.models.signal import Grid
from app.services.experiment_service import mirror_study
from app.utils.export import (
    mirror_study_table,
    read_csv,
    read_lines_csv,
    to_gray,
    write_csv,
    write_named_vectors,
    write_pgm,
)


class TestCsv:
    """CSV round trips."""

    def test_header_and_rows(self, tmp_path, rng):
        values = rng.normal(size=(3, 2))
        path = tmp_path / "table.csv"
        write_csv(path, values, ["a", "b"])
        columns, array = read_csv(path)
        assert columns == ["a", "b"]
        assert np.array_equal(array, values)

    def test_vector_is_one_column(self, tmp_path):
        path = tmp_path / "vector.csv"
        write_csv(path, [1.0, 2.0, 3.0])
        columns, array = read_csv(path)
        assert columns is None
        assert array.shape == (3, 1)

    def test_named_vectors(self, tmp_path):
        path = tmp_path / "named.csv"
        write_named_vectors(path, {"x": [0.0, 1.0], "y": [2.0, 3.0]})
        assert path.read_text().splitlines()[0] == "x,y"

    def test_empty(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(DataError, match="empty"):
            read_csv(path)

    def test_malformed(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,2\n3,oops\n")
        with pytest.raises(DataError, match="malformed"):
            read_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="cannot read"):
            read_csv(tmp_path / "missing.csv")


class TestLines:
    def test_single_column_is_one_line(self, tmp_path, mirror_signal, toy_grid):
        signal = mirror_signal(40.0, grid=toy_grid)
        path = tmp_path / "signal.csv"
        write_csv(path, signal.samples)
        lines = read_lines_csv(path)
        assert len(lines) == 1
        assert lines[0].grid == toy_grid
        assert np.array_equal(lines[0].samples, signal.samples)

    def test_rows_are_lines(self, tmp_path, rng):
        path = tmp_path / "lines.csv"
        write_csv(path, rng.normal(size=(3, 64)))
        lines = read_lines_csv(path, envelope_sigma=0.2)
        assert len(lines) == 3
        assert lines[0].grid.envelope_sigma == 0.2

    def test_width_must_be_power_of_two(self, tmp_path):
        path = tmp_path / "lines.csv"
        write_csv(path, np.zeros((2, 100)))
        with pytest.raises(ShapeMismatchError, match="valid grid"):
            read_lines_csv(path)


class TestPgm:
    def test_binary_header(self, tmp_path, rng):
        path = tmp_path / "image.pgm"
        image = rng.random((4, 6))
        write_pgm(path, image)
        data = path.read_bytes()
        assert data.startswith(b"P5")
        assert data[-24:] == to_gray(image).tobytes()

    def test_gray_scaling(self):
        assert to_gray([[0.0, 0.5, 1.0]]).tolist() == [[0, 128, 255]]
        assert not to_gray(np.full((2, 2), 3.0)).any()

    def test_rejects_vectors(self, tmp_path):
        with pytest.raises(DataError, match="2-D"):
            write_pgm(tmp_path / "line.pgm", [0.0, 1.0])


def test_mirror_study_table():
    result = mirror_study(depths=[40.0, 240.0, 440.0], system=SystemDistortion(a2_per_bin=0.1), grid=Grid())
    columns, table = mirror_study_table(result)
    assert columns[0] == "depth"
    assert len(columns) == 13
    assert table.shape == (3, 13)
    assert np.isnan(table[:, columns.index("net1_fwhm")]).all()
