"""Closed-form correlation dynamics for three initial two-atom states.

``BELL_ZERO_DOUBLE`` starts in (|ee> + |gg>)/sqrt(2), ``SINGLE_EXCITATION``
in |eg> and ``SYMMETRIC_BELL`` in the superradiant state |+>. Each scenario
has a state function returning the X state at time ``tau`` and a
correlations function evaluating concurrence, trace-distance discord and
local quantum uncertainty from scenario-specific formulas. The
``near_zero`` variants are the coincident-atom limit ``gamma = 1``.
"""
import enum
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    CollectiveParams,
    CollectiveState,
    collective_to_product,
    evolve_closed_form,
)
from .exceptions import DegenerateBlock
from .measures import _clamp, concurrence, lqu, tqd_x
from .states import XState

# below this |1 - gamma^2| the scenario-A formulas are evaluated through the
# collective dynamics, which has no (1 - gamma^2) denominators
_UNIT_GAMMA_TOL = 1e-6
_DEGENERATE_TOL = 1e-14


class ScenarioKind(str, enum.Enum):
    BELL_ZERO_DOUBLE = "bell-zero-double"
    SINGLE_EXCITATION = "single-excitation"
    SYMMETRIC_BELL = "symmetric"


@dataclass(frozen=True)
class Scenario:
    kind: ScenarioKind
    near_zero_separation: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", ScenarioKind(self.kind))


@dataclass(frozen=True)
class CorrelationReport:
    """One sample of a correlation time series."""

    tau: float
    concurrence: float
    tqd: float
    lqu: float
    p_plus: float
    p_minus: float

    def __post_init__(self):
        values = (self.tau, self.concurrence, self.tqd, self.lqu, self.p_plus, self.p_minus)
        if not all(math.isfinite(v) for v in values):
            raise ValueError(f"non-finite value in report {values!r}")
        for name in ("concurrence", "tqd", "lqu"):
            v = _clamp(getattr(self, name))
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} = {v!r} outside [0, 1]")
            object.__setattr__(self, name, v)

    def as_tuple(self):
        return (self.tau, self.concurrence, self.tqd, self.lqu, self.p_plus, self.p_minus)


def initial_collective_state(kind):
    """Initial state of a scenario in the Dicke basis."""
    kind = ScenarioKind(kind)
    if kind is ScenarioKind.BELL_ZERO_DOUBLE:
        return CollectiveState(0.5, 0.0, 0.0, 0.5, c_eg=0.5)
    if kind is ScenarioKind.SINGLE_EXCITATION:
        # |eg> = (|+> + |->)/sqrt(2)
        return CollectiveState(0.0, 0.5, 0.5, 0.0, c_pm=0.5)
    return CollectiveState.pure("+")


def _check_tau(tau):
    if not (math.isfinite(tau) and tau >= 0):
        raise ValueError(f"tau must be finite and non-negative, got {tau!r}")


def _collective_route(kind, gamma, eta, tau):
    s = evolve_closed_form(
        initial_collective_state(kind), CollectiveParams(gamma, eta), tau
    )
    return collective_to_product(s)


def generic_correlations(x):
    """(concurrence, tqd, lqu) from the general-purpose measure routines."""
    return concurrence(x), tqd_x(x), lqu(x, method="generic")


# ----------------------------------------------------------- zero/double Bell


def bell_zero_double_entries(gamma, tau):
    """The five distinct entries ``(a, b, c, d, e)`` of the scenario state.

    ``a = rho11``, ``b = rho22 = rho33``, ``c = rho44``, ``d = rho14`` and
    ``e = rho23``.
    """
    _check_tau(tau)
    if abs(1.0 - gamma * gamma) < _UNIT_GAMMA_TOL:
        x = _collective_route(ScenarioKind.BELL_ZERO_DOUBLE, gamma, 0.0, tau)
        return x.p11, x.p22, x.p44, x.c14.real, x.c23.real
    decay = math.exp(-tau)
    z = math.cosh(gamma * tau) - decay
    delta = (1 + gamma * gamma) * z - 2 * gamma * math.sinh(gamma * tau)
    a = 0.5 * decay * decay
    b = decay * delta / (2 * (1 - gamma * gamma))
    c = 1.0 - a - 2.0 * b
    d = 0.5 * decay
    e = decay * (2 * gamma * z - (1 + gamma * gamma) * math.sinh(gamma * tau)) / (
        2 * (1 - gamma * gamma)
    )
    return a, b, c, d, e


def state_bell_zero_double(gamma, tau):
    a, b, c, d, e = bell_zero_double_entries(gamma, tau)
    return XState(a, b, b, c, d, e)


def bell_zero_double_concurrence_branches(gamma, tau):
    """Branch values ``(C1, C2, C3)`` and the index of the selected branch.

    The branch is the one whose square-root eigenvalue of ``rho rho~`` is
    largest among ``|d + sqrt(ac)|, |d - sqrt(ac)|, |b + e|, |b - e|``; the
    first two both select ``C1``.
    """
    a, b, c, d, e = bell_zero_double_entries(gamma, tau)
    root_ac = math.sqrt(max(a * c, 0.0))
    branches = (2 * (d - b), 2 * (e - root_ac), -2 * (e + root_ac))
    candidates = (abs(d + root_ac), abs(d - root_ac), abs(b + e), abs(b - e))
    selected = (0, 0, 1, 2)[int(np.argmax(candidates))]
    return branches, selected


def _bell_zero_double_tqd(a, b, c, d, e):
    # correlation elements with the sign of e removed by a local rotation
    r11 = 2 * (d + abs(e))
    r22 = 2 * (abs(e) - d)
    r33 = 1 - 4 * b
    r30 = a - c
    if r33 * r33 >= r11 * r11:
        return abs(r11)
    r_max = max(r33 * r33, r22 * r22 + r30 * r30)
    num = r22 * r22 * (r11 * r11 - r33 * r33) + r11 * r11 * (r_max - r22 * r22)
    den = r_max - r33 * r33 + r11 * r11 - r22 * r22
    return math.sqrt(max(num / den, 0.0))


def _bell_zero_double_w(gamma, tau, b, e):
    decay2 = math.exp(-2 * tau)
    beta = 2 * b
    big_x = 1 + math.exp(-tau) * math.sqrt(max(1 - decay2 - 2 * beta, 0.0))
    y_arg = 1 + decay2 - 2 * math.exp(-tau) * math.cosh(gamma * tau)
    big_y = math.exp(-tau) * math.sqrt(max(y_arg, 0.0))
    outer = big_x - beta
    inner = beta + big_y
    if outer * inner < _DEGENERATE_TOL:
        raise DegenerateBlock("scenario state has a vanishing block")
    root = math.sqrt(outer * inner)
    # e^{-2tau} K / (1 - gamma^2) = 2 e e^{-tau}, K = 2 gamma Z - (1 + gamma^2) sinh
    shift = 2 * e * math.exp(-tau)
    w11 = root + shift / root
    w22 = root - shift / root
    w33 = (
        0.5 * (big_x + big_y)
        + ((decay2 - 1 + beta) ** 2 - decay2) / (2 * outer)
        - 2 * e * e / inner
    )
    return w11, w22, w33


def correlations_bell_zero_double(gamma, tau):
    """Concurrence, discord and LQU for the zero/double excitation Bell state."""
    a, b, c, d, e = bell_zero_double_entries(gamma, tau)
    branches, selected = bell_zero_double_concurrence_branches(gamma, tau)
    conc = max(0.0, branches[selected])
    tqd = _bell_zero_double_tqd(a, b, c, d, e)
    try:
        w11, w22, w33 = _bell_zero_double_w(gamma, tau, b, e)
        u = 1.0 - max(w11, w22, w33)
    except DegenerateBlock:
        u = lqu(XState(a, b, b, c, d, e), method="generic")
    return CorrelationReport(tau, conc, tqd, u, b + e, b - e)


# ------------------------------------------------------- single excitation


def state_single_excitation(gamma, eta, tau):
    _check_tau(tau)
    decay = math.exp(-tau)
    ch, sh = math.cosh(gamma * tau), math.sinh(gamma * tau)
    cs, sn = math.cos(2 * eta * tau), math.sin(2 * eta * tau)
    p22 = 0.5 * decay * (ch + cs)
    p33 = 0.5 * decay * (ch - cs)
    c23 = 0.5 * decay * complex(-sh, sn)
    p44 = 1.0 - decay * ch
    return XState(0.0, p22, p33, p44, 0.0, c23)


def correlations_single_excitation(gamma, eta, tau):
    """Correlations starting from |e1 g2>; concurrence and discord coincide."""
    x = state_single_excitation(gamma, eta, tau)
    decay = math.exp(-tau)
    conc = decay * math.hypot(math.sinh(gamma * tau), math.sin(2 * eta * tau))
    t2 = decay * math.cosh(gamma * tau)
    p44 = 1.0 - t2
    if p44 * t2 < _DEGENERATE_TOL:
        u = lqu(x, method="generic")
    else:
        # the inner block is rank one, so both in-plane elements coincide
        w11 = 2 * x.p22 * math.sqrt(p44) / math.sqrt(t2)
        ch = math.cosh(gamma * tau)
        w33 = (
            2 * ch
            - decay * (1 + 2 * math.sinh(gamma * tau) ** 2 - math.cos(4 * eta * tau))
        ) / (2 * ch)
        u = 1.0 - max(w11, w33)
    p_plus = 0.5 * math.exp(-(1 + gamma) * tau)
    p_minus = 0.5 * math.exp(-(1 - gamma) * tau)
    return CorrelationReport(tau, conc, conc, u, p_plus, p_minus)


# ---------------------------------------------------------- symmetric Bell


def state_symmetric(gamma, tau):
    _check_tau(tau)
    survival = math.exp(-(1 + gamma) * tau)
    alpha = 0.5 * survival
    return XState(0.0, alpha, alpha, 1.0 - survival, 0.0, alpha)


def correlations_symmetric(gamma, tau):
    """Correlations starting from |+>: all three follow the |+> population."""
    _check_tau(tau)
    survival = math.exp(-(1 + gamma) * tau)
    w33 = 1.0 - survival
    w11 = math.sqrt(survival * w33)
    return CorrelationReport(tau, survival, survival, 1.0 - max(w11, w33), survival, 0.0)


# ------------------------------------------------------ coincident atoms


def correlations_near_zero_separation(scenario, eta, tau):
    """Coincident-atom (``gamma = 1``) formulas for each scenario."""
    if not isinstance(scenario, Scenario):
        scenario = Scenario(scenario, True)
    _check_tau(tau)
    kind = scenario.kind
    decay = math.exp(-tau)
    decay2 = decay * decay
    if kind is ScenarioKind.BELL_ZERO_DOUBLE:
        c1 = decay - tau * decay2
        c2 = decay * (tau * decay - math.sqrt(max(2 - (1 + 2 * tau) * decay2, 0.0)))
        conc = max(0.0, c1, c2)
        r11 = decay + tau * decay2
        r22 = tau * decay2 - decay
        r33 = 1 - 2 * tau * decay2
        r30 = decay2 - 1 + tau * decay2
        tqd = _near_zero_tqd(r11, r22, r33, r30)
        a_ = 1 - tau * decay2
        b_root = math.sqrt(max(1 - (1 + 2 * tau) * decay2, 0.0))
        norm = tau * (a_ + decay * b_root)
        outer = a_ + decay * b_root
        if norm < _DEGENERATE_TOL:
            u = lqu(state_near_zero(scenario, eta, tau), method="generic")
        else:
            w11 = (tau * decay * a_ + tau * decay2 * (1 + b_root)) / math.sqrt(norm)
            w22 = (tau * decay * a_ + tau * decay2 * (b_root - 1)) / math.sqrt(norm)
            w33 = 0.5 * outer + (((1 + tau) * decay2 - 1) ** 2 - decay2) / (2 * outer)
            u = 1.0 - max(w11, w22, w33)
        half_pop = 0.5 * tau * decay2
        return CorrelationReport(tau, conc, tqd, u, 2 * half_pop, 0.0)
    if kind is ScenarioKind.SINGLE_EXCITATION:
        cs = math.cos(2 * eta * tau)
        sn = math.sin(2 * eta * tau)
        conc = 0.5 * math.sqrt((decay2 - 1) ** 2 + 4 * decay2 * sn * sn)
        if tau == 0:
            u = 0.0
        else:
            w11 = (
                math.sqrt(1 - decay2) * (1 + decay2 + 2 * decay * cs)
                / (2 * math.sqrt(1 + decay2))
            )
            w33 = (decay2 * (2 * math.cos(4 * eta * tau) - decay2 + 2) + 1) / (
                2 * (decay2 + 1)
            )
            u = 1.0 - max(w11, w33)
        return CorrelationReport(tau, conc, conc, u, 0.5 * decay2, 0.5)
    w33 = 1 - decay2
    w11 = decay * math.sqrt(w33)
    return CorrelationReport(tau, decay2, decay2, 1.0 - max(w11, w33), decay2, 0.0)


def _near_zero_tqd(r11, r22, r33, r30):
    r_min = min(r11 * r11, r33 * r33)
    r_max = max(r33 * r33, r22 * r22 + r30 * r30)
    den = r_max - r_min + r11 * r11 - r22 * r22
    if den < _DEGENERATE_TOL:
        return abs(r11)
    return math.sqrt(max((r11 * r11 * r_max - r22 * r22 * r_min) / den, 0.0))


def state_near_zero(scenario, eta, tau):
    """Scenario state for coincident atoms, through the collective dynamics."""
    kind = scenario.kind if isinstance(scenario, Scenario) else ScenarioKind(scenario)
    _check_tau(tau)
    return _collective_route(kind, 1.0, eta, tau)


# ------------------------------------------------------------ dispatchers


def scenario_state(scenario, gamma, eta, tau):
    """X state of ``scenario`` at time ``tau``."""
    if scenario.near_zero_separation:
        return state_near_zero(scenario, eta, tau)
    kind = scenario.kind
    if kind is ScenarioKind.BELL_ZERO_DOUBLE:
        return state_bell_zero_double(gamma, tau)
    if kind is ScenarioKind.SINGLE_EXCITATION:
        return state_single_excitation(gamma, eta, tau)
    return state_symmetric(gamma, tau)


def scenario_correlations(scenario, gamma, eta, tau):
    """Closed-form :class:`CorrelationReport` for ``scenario`` at ``tau``."""
    if scenario.near_zero_separation:
        return correlations_near_zero_separation(scenario, eta, tau)
    kind = scenario.kind
    if kind is ScenarioKind.BELL_ZERO_DOUBLE:
        return correlations_bell_zero_double(gamma, tau)
    if kind is ScenarioKind.SINGLE_EXCITATION:
        return correlations_single_excitation(gamma, eta, tau)
    return correlations_symmetric(gamma, tau)


def time_series(scenario, gamma, eta, taus):
    """Closed-form reports on a grid of times."""
    return [scenario_correlations(scenario, gamma, eta, float(t)) for t in taus]
