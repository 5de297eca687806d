import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import x_states
from dicke_correlations.dynamics import (
    AtomPairGeometry,
    CollectiveParams,
    CollectiveState,
    DICKE_BASIS,
    collective_damping_ratio,
    collective_params,
    collective_to_product,
    default_rk4_steps,
    dicke_matrix,
    dipole_dipole_shift,
    evolve_closed_form,
    integrate_rk4,
    integrate_rk4_trajectory,
    lindblad_rhs,
    product_to_collective,
    rk4_step_matrix,
)
from dicke_correlations.exceptions import (
    GammaOutOfRange,
    LargeShiftWarning,
    ResultNotPSD,
    TraceNotOne,
    ZeroSeparation,
)
from dicke_correlations.scenarios import ScenarioKind, initial_collective_state
from dicke_correlations.states import XState, validate_density
from oracles import scenario_a_entries

Z_DIPOLE = (0.0, 0.0, 1.0)


def perp(distance):
    return AtomPairGeometry.from_distance(distance, Z_DIPOLE)


def trig_gamma(xi, c):
    # textbook trigonometric form, independent of the Bessel-function code
    return 1.5 * (
        (1 - c) * math.sin(xi) / xi
        + (1 - 3 * c) * (math.cos(xi) / xi**2 - math.sin(xi) / xi**3)
    )


def trig_eta(xi, c):
    return 0.75 * (
        -(1 - c) * math.cos(xi) / xi
        + (1 - 3 * c) * (math.sin(xi) / xi**2 + math.cos(xi) / xi**3)
    )


def dicke_pops(m):
    return np.diag(dicke_matrix(m)).real


# geometry


def test_gamma_tends_to_one_at_short_range():
    for dipole in (Z_DIPOLE, (1.0, 0.0, 0.0), (0.6, 0.0, 0.8)):
        g = AtomPairGeometry.from_distance(1e-6, dipole)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", LargeShiftWarning)
            assert collective_damping_ratio(g) == pytest.approx(1.0, abs=1e-5)


def test_gamma_half_wavelength():
    assert collective_damping_ratio(perp(0.5)) == pytest.approx(-3 / (2 * math.pi**2), abs=1e-12)
    assert collective_damping_ratio(perp(0.5)) == pytest.approx(-0.1520, abs=1e-4)


def test_gamma_one_wavelength():
    assert collective_damping_ratio(perp(1.0)) == pytest.approx(3 / (8 * math.pi**2), abs=1e-12)
    assert collective_damping_ratio(perp(1.0)) == pytest.approx(0.0380, abs=1e-4)


def test_eta_half_wavelength():
    expected = 0.75 * (1 / math.pi - 1 / math.pi**3)
    assert dipole_dipole_shift(perp(0.5)) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.2145, abs=1e-4)


def test_eta_one_wavelength():
    expected = 0.75 * (-1 / (2 * math.pi) + 1 / (8 * math.pi**3))
    assert dipole_dipole_shift(perp(1.0)) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(-0.1163, abs=1e-4)


def test_eta_short_range_leading_term():
    xi = 0.1
    g = perp(xi / (2 * math.pi))
    leading = 3 / (4 * xi**3)
    assert dipole_dipole_shift(g) == pytest.approx(leading, rel=0.05)


@given(
    st.floats(0.05, 5.0),
    st.floats(0.0, math.pi),
    st.floats(0.0, 2 * math.pi),
)
def test_bessel_form_matches_trig_form(distance, theta, phi):
    dipole = (math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta))
    g = AtomPairGeometry.from_distance(distance, dipole)
    c = g.alignment
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LargeShiftWarning)
        assert collective_damping_ratio(g) == pytest.approx(trig_gamma(g.xi, c), abs=1e-9)
        assert dipole_dipole_shift(g) == pytest.approx(trig_eta(g.xi, c), rel=1e-9, abs=1e-9)
    assert -1 <= collective_damping_ratio(g) <= 1


def test_zero_separation():
    g = AtomPairGeometry(np.zeros(3), np.array(Z_DIPOLE))
    with pytest.raises(ZeroSeparation):
        collective_damping_ratio(g)
    with pytest.raises(ZeroSeparation):
        dipole_dipole_shift(g)


def test_large_shift_warning():
    with pytest.warns(LargeShiftWarning):
        dipole_dipole_shift(perp(1e-3))


def test_dipole_must_be_unit():
    with pytest.raises(ValueError):
        AtomPairGeometry(np.array([1.0, 0, 0]), np.array([0, 0, 2.0]))


def test_collective_params_from_geometry():
    p = collective_params(perp(0.5))
    assert p.gamma == pytest.approx(-0.1520, abs=1e-4)
    assert p.eta == pytest.approx(0.2145, abs=1e-4)


def test_gamma_bound():
    CollectiveParams(1.0 + 1e-13)
    with pytest.raises(GammaOutOfRange):
        CollectiveParams(1.01)


# closed-form evolution


def test_evolve_tau_zero_identity():
    s0 = CollectiveState(0.1, 0.2, 0.3, 0.4, 0.05 + 0.02j, 0.1j)
    s = evolve_closed_form(s0, CollectiveParams(0.3, 0.7), 0.0)
    for k in ("p_ee", "p_pp", "p_mm", "p_gg", "c_pm", "c_eg"):
        assert abs(getattr(s, k) - getattr(s0, k)) < 1e-15


@pytest.mark.parametrize("tau", [0.1, 1.0, 3.0])
def test_evolve_from_doubly_excited_uncoupled(tau):
    s = evolve_closed_form(CollectiveState.pure("e"), CollectiveParams(0.0), tau)
    assert s.p_ee == pytest.approx(math.exp(-2 * tau), abs=1e-15)
    assert s.p_pp == pytest.approx(math.exp(-tau) - math.exp(-2 * tau), abs=1e-15)
    assert s.p_mm == pytest.approx(s.p_pp, abs=1e-15)


def test_evolve_symmetric_population():
    s = evolve_closed_form(CollectiveState.pure("+"), CollectiveParams(0.5), 1.0)
    assert s.p_pp == pytest.approx(math.exp(-1.5), abs=1e-15)
    assert s.p_pp == pytest.approx(0.2231, abs=1e-4)


def test_evolve_unit_gamma_limit():
    # feeding of |+> at gamma = 1 is 2 tau e^{-2 tau} from a unit |e> population
    for tau in (0.0, 0.3, 1.0, 4.0):
        s = evolve_closed_form(CollectiveState.pure("e"), CollectiveParams(1.0), tau)
        assert s.p_pp == pytest.approx(2 * tau * math.exp(-2 * tau), abs=1e-15)
        assert s.p_mm == 0.0
    s = evolve_closed_form(CollectiveState.pure("e"), CollectiveParams(-1.0), 1.0)
    assert s.p_mm == pytest.approx(2 * math.exp(-2), abs=1e-15)


@given(st.floats(1e-9, 1e-5), st.floats(0.0, 10.0))
def test_evolve_continuous_at_unit_gamma(eps, tau):
    near = evolve_closed_form(CollectiveState.pure("e"), CollectiveParams(1 - eps), tau)
    at = evolve_closed_form(CollectiveState.pure("e"), CollectiveParams(1.0), tau)
    assert abs(near.p_pp - at.p_pp) < 10 * eps


def test_negative_tau_rejected():
    with pytest.raises(ValueError):
        evolve_closed_form(CollectiveState.pure("e"), CollectiveParams(0.0), -1.0)


@given(
    st.floats(-0.99, 0.99),
    st.floats(-3.0, 3.0),
    st.floats(0.0, 5.0),
    st.floats(0.0, 5.0),
)
def test_semigroup_populations(gamma, eta, t1, t2):
    p = CollectiveParams(gamma, eta)
    s0 = CollectiveState(0.4, 0.3, 0.2, 0.1)
    a = evolve_closed_form(evolve_closed_form(s0, p, t1), p, t2)
    b = evolve_closed_form(s0, p, t1 + t2)
    for k in ("p_ee", "p_pp", "p_mm", "p_gg"):
        assert getattr(a, k) == pytest.approx(getattr(b, k), abs=1e-12)


@given(
    st.floats(-0.99, 0.99),
    st.floats(-3.0, 3.0),
    st.floats(0.0, 5.0),
    st.floats(0.0, 5.0),
)
def test_semigroup_coherences(gamma, eta, t1, t2):
    p = CollectiveParams(gamma, eta)
    s0 = CollectiveState(0.25, 0.25, 0.25, 0.25, 0.2 - 0.1j, 0.2j)
    a = evolve_closed_form(evolve_closed_form(s0, p, t1), p, t2)
    b = evolve_closed_form(s0, p, t1 + t2)
    assert abs(a.c_pm - b.c_pm) < 1e-12
    assert abs(a.c_eg - b.c_eg) < 1e-12


@given(st.floats(-1.0, 1.0), st.floats(0.0, 10.0))
def test_superradiant_subradiant_split(gamma, tau):
    p = CollectiveParams(gamma)
    plus = evolve_closed_form(CollectiveState.pure("+"), p, tau)
    minus = evolve_closed_form(CollectiveState.pure("-"), p, tau)
    assert plus.p_pp == pytest.approx(math.exp(-(1 + gamma) * tau), abs=1e-12)
    assert minus.p_mm == pytest.approx(math.exp(-(1 - gamma) * tau), abs=1e-12)


@pytest.mark.parametrize("kind", list(ScenarioKind))
def test_ground_population_nonnegative(kind):
    s0 = initial_collective_state(kind)
    for gamma in np.linspace(-0.99, 0.99, 23):
        for tau in np.linspace(0, 10, 101):
            s = evolve_closed_form(s0, CollectiveParams(gamma, 0.9), tau)
            assert s.p_gg >= -1e-10


@pytest.mark.parametrize("kind", list(ScenarioKind))
def test_long_time_limit(kind):
    s = evolve_closed_form(initial_collective_state(kind), CollectiveParams(0.5, 0.9), 50.0)
    assert max(s.p_ee, s.p_pp, s.p_mm, abs(s.c_pm), abs(s.c_eg)) < 1e-6


def test_collective_state_trace_checked():
    with pytest.raises(TraceNotOne):
        CollectiveState(0.5, 0.5, 0.5, 0.0)


# product-basis mapping


def test_plus_maps_to_symmetric_coherence():
    x = collective_to_product(CollectiveState.pure("+"))
    assert (x.p22, x.p33, x.c23) == pytest.approx((0.5, 0.5, 0.5), abs=1e-15)


def test_minus_maps_to_antisymmetric_coherence():
    x = collective_to_product(CollectiveState.pure("-"))
    assert (x.p22, x.p33, x.c23) == pytest.approx((0.5, 0.5, -0.5), abs=1e-15)


def test_single_excitation_population():
    s = evolve_closed_form(
        initial_collective_state(ScenarioKind.SINGLE_EXCITATION), CollectiveParams(0.5, 0.9), 1.0
    )
    x = collective_to_product(s)
    expected = math.exp(-1) * (math.cosh(0.5) + math.cos(1.8)) / 2
    assert x.p22 == pytest.approx(expected, abs=1e-15)
    assert x.p22 == pytest.approx(0.1656, abs=1e-4)


def test_invalid_mapping_raises():
    # a c_pm this large makes the inner product-basis block non-positive
    s = CollectiveState(0.0, 0.5, 0.5, 0.0, c_pm=0.6)
    with pytest.raises(ResultNotPSD):
        collective_to_product(s)


def test_inverse_mapping_examples():
    assert product_to_collective(XState(0, 0.5, 0.5, 0, 0, 0.5)) == CollectiveState.pure("+")
    s = product_to_collective(XState(0, 0.5, 0.5, 0, 0, 0))
    assert (s.p_pp, s.p_mm, s.c_pm) == (0.5, 0.5, 0)


@given(x_states())
def test_mapping_round_trip(x):
    y = collective_to_product(product_to_collective(x))
    np.testing.assert_allclose(y.to_matrix(), x.to_matrix(), atol=1e-12)


@given(x_states())
def test_mapping_matches_basis_change(x):
    # populations of |+-> from an explicit change of basis
    d = dicke_matrix(x.to_matrix())
    s = product_to_collective(x)
    assert s.p_pp == pytest.approx(d[1, 1].real, abs=1e-12)
    assert s.p_mm == pytest.approx(d[2, 2].real, abs=1e-12)
    # c_pm is <-|rho|+> as a matrix element
    assert abs(s.c_pm - d[2, 1]) < 1e-12


def test_dicke_basis_is_unitary():
    np.testing.assert_allclose(DICKE_BASIS.conj().T @ DICKE_BASIS, np.eye(4), atol=1e-15)


# master equation


def projector(vec):
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def test_rhs_ground_state_is_dark():
    out = lindblad_rhs(projector([0, 0, 0, 1]), CollectiveParams(0.7, 1.3))
    np.testing.assert_array_equal(out, np.zeros((4, 4)))


def test_rhs_doubly_excited_decay_rate():
    out = lindblad_rhs(projector([1, 0, 0, 0]), CollectiveParams(0.4, 0.2))
    assert out[0, 0].real == pytest.approx(-2.0, abs=1e-15)


@pytest.mark.parametrize("gamma", [-0.9, 0.0, 0.35, 1.0])
def test_rhs_symmetric_state_rate(gamma):
    out = lindblad_rhs(projector([0, 1, 1, 0]), CollectiveParams(gamma, 0.8))
    assert dicke_matrix(out)[1, 1].real == pytest.approx(-(1 + gamma), abs=1e-14)
    out = lindblad_rhs(projector([0, 1, -1, 0]), CollectiveParams(gamma, 0.8))
    assert dicke_matrix(out)[2, 2].real == pytest.approx(-(1 - gamma), abs=1e-14)


@given(st.integers(0, 2**32 - 1), st.floats(-1, 1), st.floats(-5, 5))
def test_rhs_traceless_and_hermitian(seed, gamma, eta):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    out = lindblad_rhs(rho, CollectiveParams(gamma, eta))
    assert abs(np.trace(out)) < 1e-12
    np.testing.assert_allclose(out, out.conj().T, atol=1e-12)


def test_rhs_matches_closed_form_derivative():
    p = CollectiveParams(0.6, 1.1)
    s0 = CollectiveState(0.3, 0.2, 0.1, 0.4, 0.05 + 0.1j, 0.2)
    rho0 = collective_to_product(s0).to_matrix()
    h = 1e-6
    plus = collective_to_product(evolve_closed_form(s0, p, h)).to_matrix()
    numeric = (plus - rho0) / h
    np.testing.assert_allclose(lindblad_rhs(rho0, p), numeric, atol=1e-5)


def test_rhs_batched():
    p = CollectiveParams(0.3, 0.4)
    stack = np.array([projector([1, 0, 0, 0]), projector([0, 1, 1, 0])])
    out = lindblad_rhs(stack, p)
    np.testing.assert_allclose(out[1], lindblad_rhs(stack[1], p), atol=1e-15)


# RK4


def test_rk4_tau_zero():
    rho0 = projector([1, 0, 0, 1])
    np.testing.assert_allclose(integrate_rk4(rho0, CollectiveParams(0.2), 0.0, 10).entries, rho0)


def test_rk4_step_matrix_is_classical_rk4():
    p = CollectiveParams(0.3, 0.8)
    h = 0.01
    rho = projector([1, 0.3j, 0.2, 1])
    k1 = lindblad_rhs(rho, p)
    k2 = lindblad_rhs(rho + h / 2 * k1, p)
    k3 = lindblad_rhs(rho + h / 2 * k2, p)
    k4 = lindblad_rhs(rho + h * k3, p)
    expected = rho + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    got = (rk4_step_matrix(p, h) @ rho.reshape(16)).reshape(4, 4)
    np.testing.assert_allclose(got, expected, atol=1e-15)


def test_rk4_bell_zero_double_entries():
    rho0 = projector([1, 0, 0, 1])
    rho = integrate_rk4(rho0, CollectiveParams(0.9), 0.5, 2000).entries
    a, b, c, d, e = scenario_a_entries(0.9, 0.5)
    assert (a, d, b, e, c) == pytest.approx((0.1839, 0.3033, 0.0973, 0.0819, 0.6215), abs=1e-4)
    expected = np.array([[a, 0, 0, d], [0, b, e, 0], [0, e, b, 0], [d, 0, 0, c]])
    np.testing.assert_allclose(rho, expected, atol=1e-8)


def test_rk4_single_excitation():
    rho = integrate_rk4(projector([0, 1, 0, 0]), CollectiveParams(0.5, 0.9), 1.0, 2000).entries
    assert rho[1, 1].real == pytest.approx(0.1656, abs=1e-4)
    expected = math.exp(-1) * (math.cosh(0.5) + math.cos(1.8)) / 2
    assert rho[1, 1].real == pytest.approx(expected, abs=1e-8)


def test_rk4_coherence_sign_convention():
    # the RK4 solution carries <+|rho|-> = conj(c_pm) of the closed form
    p = CollectiveParams(0.4, 1.3)
    s0 = initial_collective_state(ScenarioKind.SINGLE_EXCITATION)
    tau = 0.8
    rk = dicke_matrix(integrate_rk4(collective_to_product(s0), p, tau).entries)
    s = evolve_closed_form(s0, p, tau)
    assert abs(rk[1, 2] - np.conj(s.c_pm)) < 1e-9
    assert abs(rk[2, 1] - s.c_pm) < 1e-9


@given(st.floats(-1, 1), st.floats(-3, 3), st.floats(0, 10))
def test_rk4_trace_preserved(gamma, eta, tau):
    rho0 = projector([1, 0.5, 0.5j, 1])
    rho = integrate_rk4(rho0, CollectiveParams(gamma, eta), tau, steps=200)
    assert abs(np.trace(rho.entries) - 1) < 1e-10


@pytest.mark.parametrize("kind", list(ScenarioKind))
def test_rk4_matches_closed_form_and_keeps_x_shape(kind):
    p = CollectiveParams(0.5, 0.9)
    s0 = initial_collective_state(kind)
    taus = np.linspace(0, 3, 7)
    traj = integrate_rk4_trajectory(collective_to_product(s0), p, taus, steps_per_unit=1000)
    for tau, m in zip(taus, traj):
        closed = collective_to_product(evolve_closed_form(s0, p, tau)).to_matrix()
        np.testing.assert_allclose(m, closed, atol=1e-8)
        d = dicke_matrix(m)
        # one-excitation coherences never build up
        assert np.abs(d[[0, 0, 1, 2], [1, 2, 3, 3]]).max() < 1e-12


def test_rk4_matches_closed_form_from_doubly_excited():
    p = CollectiveParams(0.3, 0.0)
    m = integrate_rk4(projector([1, 0, 0, 0]), p, 2.0).entries
    s = evolve_closed_form(CollectiveState.pure("e"), p, 2.0)
    np.testing.assert_allclose(dicke_pops(m), [s.p_ee, s.p_pp, s.p_mm, s.p_gg], atol=1e-10)


def test_rk4_trajectory_validates_grid():
    with pytest.raises(ValueError):
        integrate_rk4_trajectory(projector([1, 0, 0, 0]), CollectiveParams(0), [1.0, 0.5])


def test_rk4_rejects_zero_steps():
    with pytest.raises(ValueError):
        integrate_rk4(projector([1, 0, 0, 0]), CollectiveParams(0), 1.0, steps=0)


def test_rk4_returns_valid_density():
    out = integrate_rk4(projector([1, 0, 0, 1]), CollectiveParams(-0.5, 2.0), 1.5)
    validate_density(out.entries)


def test_default_steps():
    assert default_rk4_steps(0.5, 0.2) == 2000
    assert default_rk4_steps(3.0, 0.5) == 6000
    assert default_rk4_steps(2.0, 4.0) == 16000
