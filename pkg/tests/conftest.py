import numpy as np
import pytest

from crenrich.specfun import ElementParams

# (alpha, beta) pairs used across the element tests, including a singular-weight case
PARAM_GRID = [(0.5, 0.0), (1.0, 1.0), (2.0, 0.0), (0.5, 0.5), (2.5, 0.5), (0.9, -0.3)]

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(params=PARAM_GRID, ids=lambda p: f"a{p[0]}-b{p[1]}")
def params(request):
    return ElementParams(*request.param)


def random_triangle(rng, lo=-2.0, hi=2.0, min_area=0.05):
    from crenrich.mesh import TriangleGeom

    while True:
        v = rng.uniform(lo, hi, size=(3, 2))
        area = 0.5 * abs((v[1, 0] - v[0, 0]) * (v[2, 1] - v[0, 1]) - (v[2, 0] - v[0, 0]) * (v[1, 1] - v[0, 1]))
        if area > min_area:
            return TriangleGeom(*v)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
