"""Shared test fixtures for all test types."""

import os
from collections.abc import Callable, Iterator
from pathlib import Path

import numpy as np
import pytest

from app.config import get_settings
from app.models.dataset import DatasetConfig, DatasetManifest
from app.models.network import NetConfig
from app.models.signal import Grid, ObjectSpec, RawSignal
from app.services.dataset_service import generate
from app.services.signal_model import single_interface, synthesize_signal


# Keep telemetry quiet and local for every test run.
os.environ.setdefault("TELEMETRY", "disabled")

TOY_SAMPLES = 256
TOY_ROWS = 16


@pytest.fixture(autouse=True)
def reset_settings_cache() -> Iterator[None]:
    """Settings are cached per process; tests that patch the environment need a fresh read."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def default_grid() -> Grid:
    """1024-sample grid with the default envelope."""
    return Grid()


@pytest.fixture
def toy_grid() -> Grid:
    """256-sample grid used by the desk-scale network tests."""
    return Grid(n_samples=TOY_SAMPLES)


@pytest.fixture
def toy_net_config() -> NetConfig:
    return NetConfig.toy()


@pytest.fixture
def mirror_signal() -> Callable[..., RawSignal]:
    """Factory for single-interface signals."""

    def _make(
        freq: float,
        grid: Grid | None = None,
        a2: float = 0.0,
        a3: float = 0.0,
    ) -> RawSignal:
        return synthesize_signal(single_interface(freq, a2=a2, a3=a3), grid or Grid())

    return _make


@pytest.fixture
def two_interfaces() -> ObjectSpec:
    return ObjectSpec.model_validate(
        {
            "interfaces": [
                {"freq": 60.0, "reflectivity": 1.0, "a2": 20.0, "a3": -5.0},
                {"freq": 200.0, "reflectivity": 0.5, "a2": -10.0, "a3": 8.0},
            ],
        },
    )


@pytest.fixture
def toy_dataset_config() -> Callable[..., DatasetConfig]:
    """Factory for small toy-grid dataset configurations."""

    def _make(**overrides: object) -> DatasetConfig:
        values: dict[str, object] = {
            "count": 6,
            "order": 2,
            "seed": 7,
            "grid": Grid(n_samples=TOY_SAMPLES),
            "rows": TOY_ROWS,
            "interface_range": (2, 4),
        }
        values.update(overrides)
        return DatasetConfig.model_validate(values)

    return _make


@pytest.fixture
def toy_dataset(
    tmp_path: Path,
    toy_dataset_config: Callable[..., DatasetConfig],
) -> Callable[..., tuple[Path, DatasetManifest]]:
    """Factory writing a small dataset under tmp_path and returning its path and manifest."""

    def _make(name: str = "toy.nlds", **overrides: object) -> tuple[Path, DatasetManifest]:
        path = tmp_path / name
        manifest = generate(toy_dataset_config(**overrides), path)
        return path, manifest

    return _make


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
