import json
import pathlib

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from decoforms import Form, UnimodularMap

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

GOLDENS = json.loads((pathlib.Path(__file__).parent / "goldens.json").read_text())


@pytest.fixture(scope="session")
def goldens():
    return GOLDENS


@st.composite
def binary_forms(draw, min_degree=2, max_degree=5, bound=9, full=False):
    """Random binary forms; ``full`` forces non-zero end coefficients."""
    d = draw(st.integers(min_degree, max_degree))
    coeffs = draw(st.lists(st.integers(-bound, bound), min_size=d + 1, max_size=d + 1))
    if full:
        coeffs[0] = coeffs[0] or 1
        coeffs[-1] = coeffs[-1] or 1
    if not any(coeffs):
        coeffs[-1] = 1
    return Form.from_binary(coeffs)


ELEMENTARY = [((1, 1), (0, 1)), ((1, -1), (0, 1)), ((1, 0), (1, 1)), ((1, 0), (-1, 1)),
              ((0, 1), (1, 0)), ((-1, 0), (0, 1))]


@st.composite
def gl2(draw, max_len=4):
    T = UnimodularMap.identity(2)
    for k in draw(st.lists(st.integers(0, len(ELEMENTARY) - 1), max_size=max_len)):
        T = T @ UnimodularMap(ELEMENTARY[k])
    return T


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
