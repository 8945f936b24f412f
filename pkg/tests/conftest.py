from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

import arealstats as ast

DATA = Path(ast.__file__).parent / "data"

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def grid20():
    return ast.build_grid(20, 20, 1.0)


@pytest.fixture(scope="session")
def irregular():
    return ast.load_structure(DATA / "irregular30.geojson")


@pytest.fixture(scope="session")
def unit_square():
    return ast.Region.from_rect((0.0, 0.0, 1.0, 1.0))


@pytest.fixture(scope="session")
def square10():
    return ast.Region.from_rect((0.0, 0.0, 10.0, 10.0))


def lattice(n, spacing=1.0, origin=(0.0, 0.0)):
    """n x n lattice points with the given spacing, corner at ``origin``."""
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return np.column_stack([origin[0] + i.ravel() * spacing, origin[1] + j.ravel() * spacing])
