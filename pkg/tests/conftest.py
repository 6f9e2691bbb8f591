import numpy as np
import pytest

from cachecomp import table_i


@pytest.fixture(scope="session")
def p():
    return table_i()


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


_CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line; call with (number, passed, detail)."""

    def record(number, passed, detail):
        _CRITERIA[number] = (bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok, detail = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
