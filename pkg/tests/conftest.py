import functools

import pytest

from su2riccati.catalog import CASES, build_case


@functools.lru_cache(maxsize=None)
def _bundle(name):
    return build_case(name)


@pytest.fixture(scope="session")
def bundles():
    return {name: _bundle(name) for name in CASES}


@pytest.fixture(params=CASES)
def bundle(request):
    return _bundle(request.param)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
