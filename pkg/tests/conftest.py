import numpy as np
import pytest

from vdakey.antenna import RingAntenna
from vdakey.channel import Geometry


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def ring():
    return RingAntenna(6, 0.0625, 0.125)


@pytest.fixture
def geometry():
    return Geometry(25.0, 3.0, 3.0, 0.0)


_CRITERIA: dict = {}


@pytest.fixture
def criterion():
    """Record ``(number, passed, detail)`` for the acceptance summary."""

    def record(number: int, passed: bool, detail: str):
        _CRITERIA[number] = (bool(passed), detail)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'} {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        passed, detail = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
