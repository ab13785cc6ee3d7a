import pytest

from wps_beilinson.beilinson import ResolutionBundle
from wps_beilinson.graded_core import WeightVector

ACCEPTANCE_WEIGHTS = [(1, 1), (1, 1, 1), (1, 1, 2), (1, 2, 3), (1, 1, 1, 1, 1), (1, 1, 2, 2, 3)]
SMALL_WEIGHTS = [(1, 1), (1, 1, 1), (1, 1, 2), (1, 2, 3)]

_BUNDLES: dict = {}


def bundle_for(weights) -> ResolutionBundle:
    """Shared cache so R_k is built once per weight vector per session."""
    if weights not in _BUNDLES:
        _BUNDLES[weights] = ResolutionBundle(WeightVector(weights))
    return _BUNDLES[weights]


@pytest.fixture
def bundles():
    return bundle_for


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n][1])
