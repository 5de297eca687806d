import numpy as np
import pytest
from hypothesis import strategies as st

from dicke_correlations.states import XState, validate_density

ACCEPTANCE_RESULTS = {}


@st.composite
def x_states(draw, complex_coherences=True, min_weight=0.0):
    """Valid X states; coherences anywhere inside the PSD disc."""
    raw = [draw(st.floats(min_weight, 1.0)) for _ in range(4)]
    if sum(raw) == 0:
        raw[0] = 1.0
    p = np.array(raw) / sum(raw)
    p[3] = 1.0 - p[:3].sum()
    if p[3] < 0:
        p[3] = 0.0
        p[0] = 1.0 - p[1:].sum()
    r14 = draw(st.floats(0.0, 1.0)) * np.sqrt(p[0] * p[3])
    r23 = draw(st.floats(0.0, 1.0)) * np.sqrt(p[1] * p[2])
    if complex_coherences:
        ph14 = draw(st.floats(0.0, 2 * np.pi))
        ph23 = draw(st.floats(0.0, 2 * np.pi))
    else:
        ph14 = np.pi * draw(st.integers(0, 1))
        ph23 = np.pi * draw(st.integers(0, 1))
    return XState(*p, r14 * np.exp(1j * ph14), r23 * np.exp(1j * ph23))


@st.composite
def density_matrices(draw, max_rank=4):
    """Random two-qubit states from Ginibre matrices of random rank."""
    seed = draw(st.integers(0, 2**32 - 1))
    rank = draw(st.integers(1, max_rank))
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    m = g @ g.conj().T
    return validate_density(m / np.trace(m).real)


def random_local_unitary(rng):
    def su2():
        q = rng.normal(size=4)
        q /= np.linalg.norm(q)
        a, b = q[0] + 1j * q[1], q[2] + 1j * q[3]
        return np.array([[a, -b.conjugate()], [b, a.conjugate()]])

    return np.kron(su2(), su2())


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[key])


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)
