"""Tests for GoF evaluation reports."""

import csv
import json

import numpy as np
import pytest

from app.errors import DataError, OrderMismatchError, ShapeMismatchError
from app.models.report import GofReport
from app.nn.unet import zero_state
from app.services.evaluation_service import (
    evaluate,
    evaluate_predictions,
    write_report_csv,
    write_report_json,
)


@pytest.fixture
def targets(rng):
    return rng.random((4, 32))


class TestEvaluatePredictions:
    """Aggregation by interface count."""

    def test_perfect_predictor(self, targets):
        report = evaluate_predictions(targets, targets, [2, 2, 3, 3])
        assert report.primary.total_below_95 == 0
        assert report.mean_gof == 100.0

    def test_constructed_breakdown(self, targets):
        pred = targets.copy()
        pred[[0, 2]] += 0.5
        report = evaluate_predictions(pred, targets, [2, 2, 3, 3], thresholds=(0.001,))
        table = report.primary
        assert [b.interface_count for b in table.buckets] == list(range(2, 13))
        assert table.total_below_95 == 2
        assert table.total_percent_below == 50.0
        assert table.buckets[0].percent_below == 50.0
        assert table.mean_gof == 50.0

    def test_empty_bucket(self, targets):
        bucket = evaluate_predictions(targets, targets, [2, 2, 3, 3]).primary.buckets[-1]
        assert bucket.size == 0
        assert bucket.percent_below == 0.0
        assert bucket.gof_min is None

    def test_sample_gof_keys(self, targets):
        report = evaluate_predictions(targets, targets, [2, 2, 3, 3])
        assert set(report.sample_gof) == {"0.001", "0.01"}
        assert report.sample_gof["0.001"] == [100.0] * 4
        assert report.primary_threshold == 0.001

    def test_empty(self):
        with pytest.raises(DataError, match="empty"):
            evaluate_predictions(np.zeros((0, 8)), np.zeros((0, 8)), [])

    def test_shape_mismatch(self, targets):
        with pytest.raises(ShapeMismatchError):
            evaluate_predictions(targets, targets[:, :16], [2, 2, 3, 3])

    def test_needs_threshold(self, targets):
        with pytest.raises(ValueError, match="threshold"):
            evaluate_predictions(targets, targets, [2, 2, 3, 3], thresholds=())

    @pytest.mark.parametrize("thresholds", [(0.0,), (0.01, -0.1), (float("nan"),)])
    def test_thresholds_must_be_positive(self, targets, thresholds):
        with pytest.raises(ValueError, match="thresholds must be positive"):
            evaluate_predictions(targets, targets, [2, 2, 3, 3], thresholds=thresholds)

    def test_primary_threshold_must_be_positive(self, targets):
        with pytest.raises(ValueError, match="thresholds must be positive"):
            evaluate_predictions(
                targets, targets, [2, 2, 3, 3], thresholds=(0.01,), primary_threshold=0.0
            )


class TestEvaluate:
    """Running a network over a dataset file."""

    def test_order_mismatch(self, toy_dataset, toy_net_config):
        path, _ = toy_dataset(order=3)
        with pytest.raises(OrderMismatchError, match="network removes order 2"):
            evaluate(zero_state(toy_net_config, 2), path)

    def test_order_mismatch_allowed(self, toy_dataset, toy_net_config):
        path, _ = toy_dataset(order=3)
        report = evaluate(zero_state(toy_net_config, 2), path, allow_order_mismatch=True)
        assert report.order == 3
        assert report.network_order == 2
        assert len(report.warnings) == 1

    def test_constant_predictor_scores_low(self, toy_dataset, toy_net_config):
        path, _ = toy_dataset()
        report = evaluate(zero_state(toy_net_config, 2), path, thresholds=(0.001,))
        assert report.mean_gof < 50.0
        assert report.primary.total_size == 6


class TestWriters:
    def test_csv_layout(self, targets, tmp_path):
        report = evaluate_predictions(targets, targets, [2, 2, 3, 3])
        path = tmp_path / "report.csv"
        write_report_csv(report, path)
        rows = list(csv.reader(path.read_text(encoding="utf-8").splitlines()))
        assert rows[0][:2] == ["threshold", "interface_count"]
        assert len(rows) == 1 + 2 * 12
        totals = [row for row in rows if row[1] == "total"]
        assert [row[0] for row in totals] == ["0.001", "0.01"]
        assert totals[0][3] == "4"

    def test_json_round_trip(self, targets, tmp_path):
        report = evaluate_predictions(targets, targets, [2, 2, 3, 3])
        path = tmp_path / "report.json"
        write_report_json(report, path)
        assert json.loads(path.read_text())["tables"]["0.01"]["total_size"] == 4
        assert GofReport.model_validate_json(path.read_text()) == report
