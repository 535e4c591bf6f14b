import math

import numpy as np
import pytest
from hypothesis import strategies as st

from newsgame import ModelParams, PolicyPair

P0 = dict(phi_v=1.0, phi_m=0.0, gamma=1.0, xi=1.0, phi=4.0)

# closed forms worked out by hand for the baseline parameters (k_bar = 1)
Q_MID_05 = PolicyPair(0.5 - math.sqrt(2.0) / 4.0, 0.0)
Q_HIGH_4 = PolicyPair(1.0 + 0.125 - 1.0 / math.sqrt(2.0), 1.0 - 1.0 / math.sqrt(2.0))


def p0(k: float = 1.0, **over) -> ModelParams:
    return ModelParams(**{**P0, **over}, k=float(k))


def random_params(rng: np.random.Generator, k: float = 1.0) -> ModelParams:
    """A random parameter set satisfying every validity constraint."""
    phi_m = rng.uniform(-2.0, 1.0)
    span = rng.uniform(0.3, 2.0)
    gamma = rng.uniform(0.3, 3.0)
    xi = rng.uniform(0.2, 5.0)
    phi = 3.0 * gamma * span**2 * rng.uniform(1.0, 2.5)
    return ModelParams(phi_m + span, phi_m, gamma, xi, phi, k)


@st.composite
def valid_params(draw):
    phi_m = draw(st.floats(-3.0, 3.0))
    span = draw(st.floats(0.05, 3.0))
    gamma = draw(st.floats(0.1, 5.0))
    xi = draw(st.floats(0.05, 10.0))
    phi = 3.0 * gamma * span**2 * draw(st.floats(1.0, 4.0))
    k_rel = draw(st.floats(1e-3, 1e3))
    p = ModelParams(phi_m + span, phi_m, gamma, xi, phi, 1.0)
    return p.with_k(k_rel * p.k_bar)


@st.composite
def params_and_policies(draw):
    p = draw(valid_params())
    q_i = draw(st.floats(p.phi_m, p.phi_v))
    q_c = draw(st.floats(p.phi_m, p.phi_v))
    if abs(q_c - q_i) < 1e-9 * p.span:
        q_c = q_i  # gaps this small only probe floating-point underflow
    return p, PolicyPair(q_i, q_c)


@pytest.fixture
def base():
    return p0


# one summary line per acceptance criterion, printed after the run
_CRITERIA: dict[int, tuple[str, bool]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _CRITERIA[number] = (title, rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}")
