import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from jkwalk.coin_params import CoinU2, InitialState

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FIG_PSI = InitialState.from_phases([10, 30, 340])

angles = st.floats(0.0, 2 * np.pi, allow_nan=False)


@st.composite
def coins(draw, margin=1e-3):
    """Random U(2) coin with every entry bounded away from zero."""
    al, be, ga = draw(angles), draw(angles), draw(angles)
    th = draw(st.floats(margin, np.pi / 2 - margin))
    m = np.exp(1j * al) * np.array([
        [np.cos(th) * np.exp(1j * be), np.sin(th) * np.exp(1j * ga)],
        [-np.sin(th) * np.exp(-1j * ga), np.cos(th) * np.exp(-1j * be)],
    ])
    return CoinU2.from_matrix(m)


@st.composite
def phi0_coins(draw, margin=1e-2):
    """Coins with ``c`` real and positive."""
    th = draw(st.floats(margin, np.pi / 2 - margin))
    al, be = draw(angles), draw(angles)
    a = np.cos(th) * np.exp(1j * al)
    b = np.sin(th) * np.exp(1j * be)
    c = np.sin(th)
    d = -np.conj(a) * c / np.conj(b)
    return CoinU2.from_matrix([[a, b], [c, d]])


@st.composite
def states(draw, kappa):
    re = draw(st.lists(st.floats(-1, 1), min_size=kappa, max_size=kappa))
    im = draw(st.lists(st.floats(-1, 1), min_size=kappa, max_size=kappa))
    v = np.array(re) + 1j * np.array(im)
    n = np.linalg.norm(v)
    if n < 1e-3:
        v = np.zeros(kappa, complex)
        v[0] = 1.0
        n = 1.0
    return InitialState(v / n)


ACCEPTANCE_LINES = []


@pytest.fixture
def record_criterion():
    def rec(number, passed, detail):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append((number, line))
        print(line)
        return passed
    return rec


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
