"""Fixtures for running the command line in-process."""

import json
from collections.abc import Callable
from pathlib import Path

import pytest

from app.main import THREAD_VARIABLES, dispatch


TOY_GRID = json.dumps({"n_samples": 256})


@pytest.fixture(autouse=True)
def restore_process_env(monkeypatch: pytest.MonkeyPatch) -> None:
    """dispatch() writes thread caps and telemetry variables into os.environ."""
    for variable in (*THREAD_VARIABLES, "LOG_LEVEL", "LOG_PATH"):
        monkeypatch.setenv(variable, "1" if variable in THREAD_VARIABLES else "INFO")


@pytest.fixture
def cli(capsys: pytest.CaptureFixture[str]) -> Callable[..., tuple[int, str]]:
    """Run ``nlrm`` with string arguments; returns (exit code, stdout)."""

    def _run(*args: object) -> tuple[int, str]:
        code = dispatch([str(arg) for arg in args])
        return code, capsys.readouterr().out

    return _run


@pytest.fixture
def toy_dataset_file(tmp_path: Path, cli: Callable[..., tuple[int, str]]) -> Callable[..., Path]:
    """Generate a six-sample toy dataset through the CLI."""

    def _make(name: str = "toy.nlds", *extra: object) -> Path:
        path = tmp_path / name
        code, _ = cli(
            "gen-dataset",
            "--out",
            path,
            "--count",
            6,
            "--grid",
            TOY_GRID,
            "--rows",
            16,
            "--interface-range",
            "[2,4]",
            "--seed",
            3,
            *extra,
        )
        assert code == 0
        return path

    return _make
