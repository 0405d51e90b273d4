import numpy as np
import pytest

from mrgrid.gf2k import make_field


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=[1, 4, 8, 16, 32], ids=lambda d: f"GF2^{d}")
def field(request):
    return make_field(request.param)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
