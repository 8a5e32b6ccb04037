"""End-to-end runs of the nlrm command line."""

import json

import numpy as np

from app.models.network import TrainReport
from app.services.signal_model import single_interface, write_object
from app.utils.export import read_csv, write_csv


TOY_GRID = json.dumps({"n_samples": 256})


class TestSurface:
    """Version, usage and exit codes."""

    def test_version(self, cli):
        code, out = cli("--version")
        assert code == 0
        assert out.splitlines() == ["nlrm 0.1.0", "NLDS 1", "NLNW 1"]

    def test_no_command(self, cli):
        code, _ = cli()
        assert code == 1

    def test_unknown_command(self, cli):
        code, _ = cli("frobnicate")
        assert code == 1

    def test_missing_output(self, cli):
        code, _ = cli("simulate")
        assert code == 1

    def test_invalid_value(self, cli, tmp_path):
        code, _ = cli("gen-dataset", "--out", tmp_path / "x.nlds", "--count", -1)
        assert code == 1


class TestSignals:
    def test_simulate_stack_plot(self, cli, tmp_path):
        obj = tmp_path / "object.json"
        write_object(single_interface(50.0, a2=20.0), obj)
        signal = tmp_path / "signal.csv"

        code, out = cli("simulate", "--object-json", obj, "--out", signal, "--grid", TOY_GRID)
        assert code == 0
        assert "amplitude" in out
        _, samples = read_csv(signal)
        assert samples.shape == (256, 1)
        assert (tmp_path / "signal.csv.config.json").exists()

        stack = tmp_path / "stack.csv"
        preview = tmp_path / "stack.pgm"
        code, _ = cli("stack", "--signal", signal, "--out", stack, "--rows", 16, "--preview", preview)
        assert code == 0
        _, rows = read_csv(stack)
        assert rows.shape == (16, 256)
        assert rows.min() == 0.0
        assert rows.max() == 1.0
        assert preview.read_bytes().startswith(b"P5")

        svg = tmp_path / "stack.svg"
        code, _ = cli("plot", "--csv", stack, "--kind", "heatmap", "--out", svg)
        assert code == 0
        assert b"<svg" in svg.read_bytes()

    def test_non_finite_signal(self, cli, tmp_path):
        samples = np.ones(256)
        samples[5] = np.nan
        signal = tmp_path / "signal.csv"
        write_csv(signal, samples)
        code, _ = cli("stack", "--signal", signal, "--out", tmp_path / "stack.csv", "--rows", 16)
        assert code == 3

    def test_config_file(self, cli, tmp_path):
        obj = tmp_path / "object.json"
        write_object(single_interface(50.0), obj)
        config = tmp_path / "run.toml"
        config.write_text('[simulate]\nnoise_rms = 0.1\nseed = 5\n\n[simulate.grid]\nn_samples = 256\n')
        signal = tmp_path / "signal.csv"
        code, _ = cli("simulate", "--config", config, "--object-json", obj, "--out", signal)
        assert code == 0
        snapshot = json.loads((tmp_path / "signal.csv.config.json").read_text())
        assert snapshot["noise_rms"] == 0.1
        assert snapshot["grid"]["n_samples"] == 256


class TestNetworkRuns:
    """Dataset generation, training and evaluation on the toy grid."""

    def test_gen_dataset_reproducible(self, toy_dataset_file):
        first = toy_dataset_file("a.nlds")
        second = toy_dataset_file("b.nlds")
        assert first.read_bytes() == second.read_bytes()

    def test_train_and_eval(self, cli, tmp_path, toy_dataset_file):
        train_set = toy_dataset_file("train.nlds")
        val_set = toy_dataset_file("val.nlds", "--seed", 4)
        reports = []
        weights = []
        for name in ("a", "b"):
            out = tmp_path / f"{name}.nlnw"
            code, stdout = cli(
                "train",
                "--deterministic",
                "--train-set",
                train_set,
                "--val-set",
                val_set,
                "--out",
                out,
                "--preset",
                "toy",
                "--levels",
                1,
                "--base-channels",
                2,
                "--epochs",
                1,
            )
            assert code == 0
            assert "best epoch 1/1" in stdout
            reports.append(TrainReport.model_validate_json((tmp_path / f"{name}.report.json").read_text()))
            weights.append(out.read_bytes())
        assert reports[0] == reports[1]
        assert weights[0] == weights[1]

        code, stdout = cli(
            "eval",
            "--weights",
            tmp_path / "a.nlnw",
            "--dataset",
            val_set,
            "--out",
            tmp_path / "report.csv",
        )
        assert code == 0
        assert "GoF threshold 0.001" in stdout
        assert "total" in stdout
        assert (tmp_path / "report.json").exists()

        inferred = tmp_path / "inferred.csv"
        code, _ = cli("infer", "--weights", tmp_path / "a.nlnw", "--dataset", val_set, "--out", inferred)
        assert code == 0
        _, outputs = read_csv(inferred)
        assert outputs.shape == (6, 256)

    def test_eval_order_mismatch(self, cli, tmp_path, toy_dataset_file):
        train_set = toy_dataset_file("train.nlds")
        order3 = toy_dataset_file("order3.nlds", "--order", 3)
        out = tmp_path / "net.nlnw"
        code, _ = cli(
            "train",
            "--train-set",
            train_set,
            "--val-set",
            train_set,
            "--out",
            out,
            "--preset",
            "toy",
            "--levels",
            1,
            "--base-channels",
            2,
            "--epochs",
            0,
        )
        assert code == 0
        code, _ = cli("eval", "--weights", out, "--dataset", order3, "--out", tmp_path / "r.csv")
        assert code == 2
        code, stdout = cli(
            "eval",
            "--weights",
            out,
            "--dataset",
            order3,
            "--out",
            tmp_path / "r.csv",
            "--allow-order-mismatch",
        )
        assert code == 0
        assert "warning:" in stdout

    def test_garbage_weights(self, cli, tmp_path, toy_dataset_file):
        dataset = toy_dataset_file()
        weights = tmp_path / "garbage.nlnw"
        weights.write_bytes(b"not a weight file")
        code, _ = cli("eval", "--weights", weights, "--dataset", dataset, "--out", tmp_path / "r.csv")
        assert code == 2


class TestBaselineRuns:
    def test_calibrate_and_linearize(self, cli, tmp_path):
        calibration = tmp_path / "calibration.json"
        code, out = cli("calibrate", "--grid", TOY_GRID, "--out", calibration)
        assert code == 0
        assert "synthetic mirrors at 10 and 60" in out

        obj = tmp_path / "object.json"
        write_object(single_interface(50.0), obj)
        signal = tmp_path / "signal.csv"
        assert cli("simulate", "--object-json", obj, "--out", signal, "--grid", TOY_GRID)[0] == 0

        linear = tmp_path / "linear.csv"
        code, _ = cli("linearize", "--signals", signal, "--calibration", calibration, "--out", linear)
        assert code == 0
        _, amplitude = read_csv(linear)
        assert amplitude.shape == (256, 1)

    def test_calibrate_needs_both_mirrors(self, cli, tmp_path):
        code, _ = cli("calibrate", "--mirror1", tmp_path / "m.csv", "--out", tmp_path / "c.json")
        assert code == 1

    def test_bscan(self, cli, tmp_path):
        out = tmp_path / "bscan.csv"
        code, stdout = cli("bscan", "--grid", TOY_GRID, "--lines", 4, "--out", out)
        assert code == 0
        assert "4 x 256" in stdout
        assert (tmp_path / "bscan.pgm").read_bytes().startswith(b"P5")

    def test_bscan_network_needs_weights(self, cli, tmp_path):
        code, _ = cli("bscan", "--pipeline", "net1", "--out", tmp_path / "b.csv")
        assert code == 1
