"""Tests for multi-line phantoms."""

import numpy as np
import pytest

from app.errors import ConfigurationError
from app.models.experiment import DEFAULT_SYSTEM
from app.services.phantoms import glass_objects, layered_objects, layered_phantom, render


def test_glass_artefact_depth_is_constant(default_grid):
    objects = glass_objects(default_grid, lines=5)
    assert {obj.interfaces[0].freq for obj in objects} == {128.0}
    fronts = [obj.interfaces[1].freq for obj in objects]
    assert fronts[0] == pytest.approx(153.6)
    assert fronts[-1] == pytest.approx(256.0)
    assert all(obj.interfaces[2].a2 == 15.0 for obj in objects)


def test_layered_dispersion_grows_with_depth(default_grid):
    obj = layered_objects(default_grid, lines=3, layers=4)[0]
    assert [i.a2 for i in obj.interfaces] == [0.0, 6.0, 12.0, 18.0]
    assert obj.interfaces[0].reflectivity == 1.0


@pytest.mark.parametrize("layers", [0, 13])
def test_layer_count_limits(default_grid, layers):
    with pytest.raises(ConfigurationError, match="layers"):
        layered_objects(default_grid, layers=layers)


def test_line_count_positive(default_grid):
    with pytest.raises(ConfigurationError, match="lines"):
        glass_objects(default_grid, lines=0)


def test_noise_is_seeded(toy_grid):
    first = layered_phantom(toy_grid, lines=3, seed=4)
    second = layered_phantom(toy_grid, lines=3, seed=4)
    other = layered_phantom(toy_grid, lines=3, seed=5)
    assert np.array_equal(first[2].samples, second[2].samples)
    assert not np.array_equal(first[2].samples, other[2].samples)


def test_render_through_system(default_grid):
    objects = glass_objects(default_grid, lines=2)
    clean = render(objects, default_grid)
    distorted = render(objects, default_grid, DEFAULT_SYSTEM)
    assert len(distorted) == 2
    assert not np.array_equal(clean[0].samples, distorted[0].samples)
