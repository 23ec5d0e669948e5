import math

import pytest

from pcap.geometry import ModelSpace, make_profile

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        prev = _ACCEPTANCE.get(number, (title, True))
        _ACCEPTANCE[number] = (title, prev[1] and rep.outcome == "passed")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, ok = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")


def space(kind="euclidean", n=2, p=2.0, **params):
    return ModelSpace(make_profile(kind, params or None), n, p)


@pytest.fixture
def E2():
    return space("euclidean", 2, 2.0)


@pytest.fixture
def E3():
    return space("euclidean", 3, 2.0)


@pytest.fixture
def H2():
    return space("hyperbolic", 2, 2.0)


def ln_tanh_half(r):
    """ln tanh(r/2), the antiderivative of 1/sinh."""
    return math.log(math.tanh(0.5 * r))
