import numpy as np
import pytest

from flockball import KernelParams, RadialGrid
from flockball.energy import matrices_for

B_ANNULUS = 1.125 ** (1.0 / 3.0)


@pytest.fixture(scope="session")
def params():
    return KernelParams(3, 2.0, 1.0)


@pytest.fixture(scope="session")
def unit_grid():
    # 1024 cells on [0, 2.5]
    return RadialGrid.uniform(2.5, 1024, 3)


@pytest.fixture(scope="session")
def coarse_grid():
    return RadialGrid.uniform(2.5, 256, 3)


@pytest.fixture(scope="session")
def unit_matrices(params, unit_grid):
    return matrices_for(params, unit_grid)


@pytest.fixture(scope="session")
def coarse_matrices(params, coarse_grid):
    return matrices_for(params, coarse_grid)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance summary: one PASS/FAIL line per criterion after the run

_ACCEPTANCE = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or rep.when != "call":
        return
    n, title = mark.args
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    _ACCEPTANCE[n] = ("PASS" if rep.passed else "FAIL", title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        verdict, title, detail = _ACCEPTANCE[n]
        line = f"{verdict} criterion {n:2d}: {title}"
        terminalreporter.write_line(line + (f" | {detail}" if detail else ""))
