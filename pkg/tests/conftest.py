import functools

import pytest

from frolov import build_basis

ACCEPTANCE_LINES = []


@functools.lru_cache(maxsize=None)
def cached_basis(d, kind="standard"):
    return build_basis(d, kind)


@pytest.fixture
def basis():
    return cached_basis


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
