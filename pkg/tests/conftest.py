import numpy as np
import pytest

from irs_fdma.numerics import RngStream


@pytest.fixture
def rng():
    return RngStream(12345, 0)


def cn(gen, *shape, scale=1.0):
    """CN(0, scale) test data from a plain numpy Generator."""
    return np.sqrt(scale / 2) * (gen.standard_normal(shape) + 1j * gen.standard_normal(shape))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
