"""Collective spontaneous emission of two identical two-level atoms.

Time is dimensionless, ``tau = Gamma t``, with ``Gamma`` the single-atom
decay rate. The pair is characterised by ``gamma = Gamma_12 / Gamma``
(collective damping) and ``eta = Omega_12 / Gamma`` (dipole-dipole shift).
All dynamics are in the frame rotating at the atomic frequency, so the free
``omega_0`` precession never appears.
"""
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import exprel, spherical_jn, spherical_yn

from .exceptions import (
    GammaOutOfRange,
    InvalidStateError,
    LargeShiftWarning,
    NotPositiveSemidefinite,
    ResultNotPSD,
    TraceNotOne,
    ZeroSeparation,
)
from .states import PSD_TOL, TRACE_TOL, XState, _matrix_of, validate_density

LARGE_SHIFT = 1e3

_SP = np.array([[0, 1], [0, 0]], dtype=complex)  # |e><g|
_I2 = np.eye(2, dtype=complex)
S_PLUS = (np.kron(_SP, _I2), np.kron(_I2, _SP))
S_MINUS = tuple(s.conj().T for s in S_PLUS)
# S_i^+ S_j^-
_HOP = [[S_PLUS[i] @ S_MINUS[j] for j in range(2)] for i in range(2)]
_EXCHANGE = _HOP[0][1] + _HOP[1][0]

# columns: |e>, |+>, |->, |g> expanded in the product basis
DICKE_BASIS = np.array(
    [
        [1, 0, 0, 0],
        [0, 1 / math.sqrt(2), 1 / math.sqrt(2), 0],
        [0, 1 / math.sqrt(2), -1 / math.sqrt(2), 0],
        [0, 0, 0, 1],
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class CollectiveParams:
    """Dimensionless collective damping ``gamma`` and shift ``eta``."""

    gamma: float
    eta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and math.isfinite(self.eta)):
            raise GammaOutOfRange("gamma and eta must be finite")
        if abs(self.gamma) > 1 + 1e-12:
            raise GammaOutOfRange(f"|gamma| = {abs(self.gamma)!r} exceeds 1")


@dataclass(frozen=True, eq=False)
class AtomPairGeometry:
    """Relative position of the atoms and their common dipole orientation.

    ``separation`` is the vector from atom 1 to atom 2 in units of the
    resonant wavelength; ``dipole_direction`` must be a unit vector.
    """

    separation: np.ndarray
    dipole_direction: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.separation, dtype=float).reshape(3)
        mu = np.asarray(self.dipole_direction, dtype=float).reshape(3)
        if abs(np.linalg.norm(mu) - 1.0) > 1e-12:
            raise ValueError(
                f"dipole direction must be a unit vector, |mu| = {np.linalg.norm(mu)!r}"
            )
        object.__setattr__(self, "separation", r)
        object.__setattr__(self, "dipole_direction", mu)

    @classmethod
    def from_distance(cls, distance, dipole, direction=(1.0, 0.0, 0.0)):
        """Atoms ``distance`` wavelengths apart along ``direction``."""
        direction = np.asarray(direction, dtype=float)
        direction = direction / np.linalg.norm(direction)
        dipole = np.asarray(dipole, dtype=float)
        return cls(distance * direction, dipole / np.linalg.norm(dipole))

    @property
    def distance(self):
        return float(np.linalg.norm(self.separation))

    @property
    def xi(self):
        """Dimensionless separation ``k0 r = 2 pi r / lambda0``."""
        return 2.0 * math.pi * self.distance

    @property
    def alignment(self):
        """``(mu_hat . r_hat)**2``."""
        d = self.distance
        if d == 0.0:
            raise ZeroSeparation("atoms are at the same position")
        return float(np.dot(self.dipole_direction, self.separation / d) ** 2)


@dataclass(frozen=True)
class CollectiveState:
    """Density matrix restricted to the entries used by the dynamics.

    Populations of the Dicke states |e>, |+>, |->, |g> plus the coherences
    ``c_eg = <e|rho|g>`` and ``c_pm``. The latter follows the sign convention
    of the closed-form solution, in which it decays as
    ``exp(-(1 - 2i eta) tau)``; as a matrix element it is ``<-|rho|+>``.
    One-excitation coherences (<e|rho|+-> etc.) are assumed zero.
    """

    p_ee: float
    p_pp: float
    p_mm: float
    p_gg: float
    c_pm: complex = 0.0
    c_eg: complex = 0.0

    def __post_init__(self):
        pops = np.array([self.p_ee, self.p_pp, self.p_mm, self.p_gg], dtype=float)
        total = pops.sum()
        if abs(total - 1.0) > TRACE_TOL:
            raise TraceNotOne(f"Dicke populations sum to {total!r}", abs(total - 1.0))
        if pops.min() < -PSD_TOL:
            raise NotPositiveSemidefinite(
                f"negative Dicke population {pops.min():.3e}", -pops.min()
            )

    @classmethod
    def pure(cls, label):
        """One of the four Dicke states, ``label`` in {'e', '+', '-', 'g'}."""
        pops = dict(p_ee=0.0, p_pp=0.0, p_mm=0.0, p_gg=0.0)
        key = {"e": "p_ee", "+": "p_pp", "-": "p_mm", "g": "p_gg"}[label]
        pops[key] = 1.0
        return cls(**pops)


def collective_damping_ratio(geometry):
    """``gamma = Gamma_12 / Gamma`` for the given geometry.

    Written with spherical Bessel functions,
    ``1.5 [(1 - c) j0(xi) - (1 - 3c) j1(xi) / xi]`` with ``c = (mu.r)^2``,
    which stays accurate as ``xi -> 0`` where the textbook trigonometric
    form cancels catastrophically.
    """
    c = geometry.alignment
    xi = geometry.xi
    j0 = spherical_jn(0, xi)
    j1_over_xi = spherical_jn(1, xi) / xi
    return float(1.5 * ((1 - c) * j0 - (1 - 3 * c) * j1_over_xi))


def dipole_dipole_shift(geometry):
    """``eta = Omega_12 / Gamma``; diverges like ``xi**-3`` at short range.

    Emits :class:`LargeShiftWarning` when ``|eta| > 1e3``.
    """
    c = geometry.alignment
    xi = geometry.xi
    y0 = spherical_yn(0, xi)
    y1_over_xi = spherical_yn(1, xi) / xi
    eta = float(0.75 * ((1 - c) * y0 - (1 - 3 * c) * y1_over_xi))
    if abs(eta) > LARGE_SHIFT:
        warnings.warn(
            f"dipole-dipole shift |eta| = {abs(eta):.3g} exceeds {LARGE_SHIFT:g}; "
            "RK4 step counts scale with it",
            LargeShiftWarning,
            stacklevel=2,
        )
    return eta


def collective_params(geometry):
    return CollectiveParams(
        collective_damping_ratio(geometry), dipole_dipole_shift(geometry)
    )


def _feeding(rate, tau):
    # (exp(-(2 - rate) tau) - exp(-2 tau)) / rate, finite as rate -> 0
    return tau * math.exp(-2.0 * tau) * float(exprel(rate * tau))


def evolve_closed_form(s0, params, tau):
    """Evolve a collective state analytically to time ``tau``.

    The cascade |e> -> |+-> -> |g> feeds |+> with weight
    ``(1 + gamma) / (1 - gamma) (e^{-(1+gamma) tau} - e^{-2 tau})``. That
    expression is evaluated through ``exprel`` so ``gamma = +-1`` (atoms at
    zero separation) needs no special branch.
    """
    if tau < 0:
        raise ValueError(f"tau must be non-negative, got {tau!r}")
    g, eta = params.gamma, params.eta
    p_ee = math.exp(-2.0 * tau) * s0.p_ee
    p_pp = (
        math.exp(-(1 + g) * tau) * s0.p_pp
        + (1 + g) * _feeding(1 - g, tau) * s0.p_ee
    )
    p_mm = (
        math.exp(-(1 - g) * tau) * s0.p_mm
        + (1 - g) * _feeding(1 + g, tau) * s0.p_ee
    )
    c_pm = np.exp(-(1 - 2j * eta) * tau) * complex(s0.c_pm)
    c_eg = math.exp(-tau) * complex(s0.c_eg)
    p_gg = 1.0 - p_ee - p_pp - p_mm
    return CollectiveState(p_ee, p_pp, p_mm, p_gg, c_pm, c_eg)


def collective_to_product(s):
    """Map a collective state onto the product-basis X state."""
    pop_sum = s.p_pp + s.p_mm
    c_pm = complex(s.c_pm)
    p22 = 0.5 * (pop_sum + 2 * c_pm.real)
    p33 = 0.5 * (pop_sum - 2 * c_pm.real)
    c23 = 0.5 * (s.p_pp - s.p_mm) + 1j * c_pm.imag
    p11 = s.p_ee
    p44 = 1.0 - p11 - p22 - p33
    try:
        return XState(p11, p22, p33, p44, complex(s.c_eg), c23)
    except InvalidStateError as exc:
        raise ResultNotPSD(f"collective state maps to an invalid X state: {exc}") from exc


def product_to_collective(x):
    """Exact inverse of :func:`collective_to_product`."""
    half = 0.5 * (x.p22 + x.p33)
    c23 = complex(x.c23)
    return CollectiveState(
        p_ee=x.p11,
        p_pp=half + c23.real,
        p_mm=half - c23.real,
        p_gg=x.p44,
        c_pm=complex(0.5 * (x.p22 - x.p33), c23.imag),
        c_eg=complex(x.c14),
    )


def dicke_matrix(rho):
    """Full density matrix in the Dicke basis (|e>, |+>, |->, |g>)."""
    m = _matrix_of(rho)
    return DICKE_BASIS.conj().T @ m @ DICKE_BASIS


def lindblad_rhs(rho, params):
    """Right-hand side ``d rho / d tau`` of the two-atom master equation.

    Coherent exchange ``eta (S1+ S2- + S2+ S1-)`` plus the collective
    dissipator with ``Gamma_ii = 1`` and ``Gamma_12 = Gamma_21 = gamma``.
    Accepts a single matrix or a stack of shape ``(..., 4, 4)``.
    """
    rho = _matrix_of(rho)
    rates = ((1.0, params.gamma), (params.gamma, 1.0))
    out = -1j * params.eta * (_EXCHANGE @ rho - rho @ _EXCHANGE)
    for i in range(2):
        for j in range(2):
            hop = _HOP[i][j]
            out -= 0.5 * rates[i][j] * (
                rho @ hop + hop @ rho - 2.0 * (S_MINUS[j] @ rho @ S_PLUS[i])
            )
    return out


def default_rk4_steps(tau, eta):
    """``ceil(2000 max(1, tau) max(1, |eta|))``; the fastest frequency is 2 eta."""
    return int(math.ceil(2000 * max(1.0, tau) * max(1.0, abs(eta))))


def rk4_step_matrix(params, h):
    """Superoperator of one classical RK4 step of size ``h``.

    Obtained by pushing the 16 matrix units through the four RK4 stages, so
    ``vec(rho_next) = M @ vec(rho)`` reproduces the stage-by-stage update.
    """
    basis = np.eye(16, dtype=complex).reshape(16, 4, 4)
    k1 = lindblad_rhs(basis, params)
    k2 = lindblad_rhs(basis + 0.5 * h * k1, params)
    k3 = lindblad_rhs(basis + 0.5 * h * k2, params)
    k4 = lindblad_rhs(basis + h * k3, params)
    stepped = basis + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return stepped.reshape(16, 16).T


def _march(vec, step, n):
    for _ in range(n):
        vec = step @ vec
    return vec


def integrate_rk4(rho0, params, tau, steps=None):
    """Integrate the master equation with fixed-step classical RK4.

    Parameters
    ----------
    rho0 : DensityMatrix or array_like
    params : CollectiveParams
    tau : float
        Final time (>= 0).
    steps : int, optional
        Number of equal steps; defaults to :func:`default_rk4_steps`.

    Returns
    -------
    DensityMatrix
    """
    m0 = _matrix_of(rho0)
    if steps is None:
        steps = default_rk4_steps(tau, params.eta)
    if steps < 1:
        raise ValueError("steps must be a positive integer")
    if tau == 0:
        return validate_density(m0)
    step = rk4_step_matrix(params, tau / steps)
    vec = _march(m0.reshape(16), step, steps)
    return validate_density(vec.reshape(4, 4))


def integrate_rk4_trajectory(rho0, params, taus, steps_per_unit=None):
    """RK4 solution sampled on an increasing grid ``taus``.

    Marches once through the grid; each interval uses
    ``ceil(steps_per_unit * dtau)`` steps (default: 2000 per unit time,
    scaled by ``max(1, |eta|)``).
    """
    m = _matrix_of(rho0)
    if steps_per_unit is None:
        steps_per_unit = 2000 * max(1.0, abs(params.eta))
    taus = np.asarray(taus, dtype=float)
    if np.any(np.diff(taus) < 0) or (taus.size and taus[0] < 0):
        raise ValueError("taus must be non-negative and increasing")
    vec = m.reshape(16)
    out = []
    now = 0.0
    cache = {}
    for tau in taus:
        dt = tau - now
        if dt > 0:
            n = max(1, int(math.ceil(steps_per_unit * dt - 1e-9)))
            h = dt / n
            key = round(h, 15)
            if key not in cache:
                cache[key] = rk4_step_matrix(params, h)
            vec = _march(vec, cache[key], n)
            now = tau
        out.append(vec.reshape(4, 4).copy())
    return np.array(out)
