import numpy as np
import pytest

from quatsurf.connections.transport import TransportSettings
from quatsurf.surfaces.grid import DomainGrid
from quatsurf.surfaces.immersion import make_cylinder, make_revolution
from quatsurf.surfaces.profile import example_profile


@pytest.fixture
def grid() -> DomainGrid:
    return DomainGrid.periodic(-1.0, 1.0, 24, 24)


@pytest.fixture
def cylinder(grid):
    return make_cylinder(grid)


@pytest.fixture
def revolution():
    return make_revolution(example_profile(), DomainGrid.periodic(-0.8, 0.8, 24, 24))


@pytest.fixture
def settings() -> TransportSettings:
    return TransportSettings(substeps=32)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)

