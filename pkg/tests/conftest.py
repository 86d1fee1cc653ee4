import numpy as np
import pytest

from curvecharts import shapes


@pytest.fixture
def circle64():
    return shapes.circle(64)


@pytest.fixture
def circle128():
    return shapes.circle(128)


@pytest.fixture
def ellipse128():
    return shapes.ellipse(128)


@pytest.fixture
def torus_geo64():
    return shapes.torus_geodesic(64, (1, 0))


@pytest.fixture
def great_circle96():
    return shapes.great_circle(96)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
