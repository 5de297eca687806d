"""Concurrence, trace-distance discord and local quantum uncertainty.

Each measure has a closed-form evaluation and an independent numerical
route (direct eigenvalue computation or an explicit minimisation) that the
test suite uses as its oracle.
"""
import math
from dataclasses import dataclass

import clarabel
import numpy as np
import scipy.sparse as sparse
from scipy.optimize import minimize

from .exceptions import BudgetTooSmall, DegenerateBlock
from .states import (
    DEGENERATE_BLOCK_TOL,
    PAULI,
    SIGMA_0,
    SIGMA_Y,
    XState,
    _matrix_of,
    block_root_norms,
    fano_bloch_decompose,
    hermitian_sqrt_generic,
    remove_x_phases,
)

CLAMP_TOL = 1e-9
DENOMINATOR_TOL = 1e-14
_YY = np.kron(SIGMA_Y, SIGMA_Y)
_LOCAL_PAULI = np.stack([np.kron(PAULI[i], SIGMA_0) for i in (1, 2, 3)])


def _clamp(value):
    """Snap rounding excursions just outside [0, 1] back onto the interval."""
    value = float(value)
    if -CLAMP_TOL <= value < 0.0:
        return 0.0
    if 1.0 < value <= 1.0 + CLAMP_TOL:
        return 1.0
    return value


@dataclass(frozen=True, eq=False)
class LocalObservable:
    """Observable ``K = n . sigma`` acting on the first qubit."""

    bloch: np.ndarray

    def __post_init__(self):
        n = np.asarray(self.bloch, dtype=float).reshape(3)
        if abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise ValueError(f"Bloch vector must be a unit vector, |n| = {np.linalg.norm(n)!r}")
        object.__setattr__(self, "bloch", n)

    @classmethod
    def from_angles(cls, theta, phi):
        return cls(_unit(theta, phi))

    def matrix(self):
        """``(n . sigma) (x) I`` as a 4x4 matrix."""
        return np.einsum("i,ijk->jk", self.bloch, _LOCAL_PAULI)


@dataclass(frozen=True, eq=False)
class WMatrix:
    """Real symmetric 3x3 matrix ``w_ij = Tr(sqrt(rho) s_i sqrt(rho) s_j)``."""

    w: np.ndarray

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.w)

    def lqu(self):
        return _clamp(1.0 - self.eigenvalues().max())


def _unit(theta, phi):
    return np.array(
        [math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)]
    )


# ---------------------------------------------------------------- concurrence


def concurrence(rho):
    """Wootters concurrence of a two-qubit state.

    The square roots of the eigenvalues of ``rho rho~`` are obtained as the
    singular values of ``sqrt(rho) sqrt(rho~)``, which avoids taking square
    roots of eigenvalues that are zero up to rounding.
    """
    root = hermitian_sqrt_generic(rho)
    flipped_root = _YY @ root.conj() @ _YY
    s = np.linalg.svd(root @ flipped_root, compute_uv=False)
    s = np.sort(np.clip(s, 0.0, None))[::-1]
    return _clamp(max(0.0, s[0] - s[1] - s[2] - s[3]))


def concurrence_x(x):
    """``2 max(0, |c14| - sqrt(p22 p33), |c23| - sqrt(p11 p44))``."""
    a = abs(x.c14) - math.sqrt(max(x.p22 * x.p33, 0.0))
    b = abs(x.c23) - math.sqrt(max(x.p11 * x.p44, 0.0))
    return _clamp(2.0 * max(0.0, a, b))


# -------------------------------------------------------- trace-distance discord


def x_correlation_elements(x):
    """Non-zero Fano-Bloch elements of the phase-removed X state.

    Returns
    -------
    dict
        Keys ``R11, R22, R33, R30, R03``.
    """
    x = remove_x_phases(x)
    return {
        "R11": 2.0 * (x.c23 + x.c14).real,
        "R22": 2.0 * (x.c23 - x.c14).real,
        "R33": 1.0 - 2.0 * (x.p22 + x.p33),
        "R30": 2.0 * (x.p11 + x.p22) - 1.0,
        "R03": 2.0 * (x.p11 + x.p33) - 1.0,
    }


def tqd_from_elements(r11, r22, r33, r30):
    """Trace-norm discord of an X state from its correlation elements."""
    r11_sq, r22_sq = r11 * r11, r22 * r22
    r_min = min(r11_sq, r33 * r33)
    r_max = max(r33 * r33, r22_sq + r30 * r30)
    denom = r_max - r_min + r11_sq - r22_sq
    if denom < DENOMINATOR_TOL:
        return _clamp(abs(r11))
    num = r11_sq * r_max - r22_sq * r_min
    return _clamp(math.sqrt(max(num / denom, 0.0)))


def tqd_x(x):
    """Trace-distance (Schatten 1-norm) discord of an X state.

    Coherence phases are removed first; the result depends only on
    ``R11, R22, R33, R30``.
    """
    if not isinstance(x, XState):
        x = XState.from_matrix(x)
    r = x_correlation_elements(x)
    return tqd_from_elements(r["R11"], r["R22"], r["R33"], r["R30"])


@dataclass(frozen=True)
class TQDBudget:
    """Search budget for :func:`tqd_bruteforce`.

    ``n_theta x n_phi`` is the density of the projector-direction grid over
    the full sphere; since ``n`` and ``-n`` give the same measurement only
    the upper hemisphere is visited. ``n_starts`` best grid points are
    polished with Nelder-Mead.
    """

    n_theta: int = 20
    n_phi: int = 40
    n_starts: int = 2
    xatol: float = 1e-5
    fatol: float = 1e-9
    maxiter: int = 300

    MIN_THETA = 4
    MIN_PHI = 8

    def __post_init__(self):
        if self.n_theta < self.MIN_THETA or self.n_phi < self.MIN_PHI:
            raise BudgetTooSmall(
                f"grid {self.n_theta}x{self.n_phi} below the floor "
                f"{self.MIN_THETA}x{self.MIN_PHI}"
            )
        if self.n_starts < 1:
            raise BudgetTooSmall("n_starts must be at least 1")


def _hermitian_basis(n):
    out = []
    for i in range(n):
        m = np.zeros((n, n), dtype=complex)
        m[i, i] = 1
        out.append(m)
    for i in range(n):
        for j in range(i + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[i, j] = m[j, i] = 1
            out.append(m)
            m = np.zeros((n, n), dtype=complex)
            m[i, j], m[j, i] = -1j, 1j
            out.append(m)
    return np.array(out)


def _real_embedding(h):
    return np.block([[h.real, -h.imag], [h.imag, h.real]])


def _svec(s):
    # upper triangle, column-major, off-diagonals scaled by sqrt(2)
    rows, cols = np.triu_indices(s.shape[0])
    order = np.lexsort((rows, cols))
    rows, cols = rows[order], cols[order]
    scale = np.where(rows == cols, 1.0, math.sqrt(2.0))
    return s[rows, cols] * scale


class _CQProjector:
    """Trace-norm distance to classical-quantum states with fixed projectors.

    After rotating qubit 1 so the measurement basis is the computational
    one, the classical-quantum states are the block-diagonal matrices
    ``M0 (+) M1`` with ``M0, M1 >= 0`` and unit total trace. The distance
    ``min ||rho - M0 (+) M1||_1`` is a small semidefinite program,

        minimise 2 tr P  s.t.  P >= 0,  P - rho + M0 (+) M1 >= 0,

    solved here with Clarabel. One solver instance is reused and only the
    right-hand side changes between directions.
    """

    _B2 = _hermitian_basis(2)
    _B4 = _hermitian_basis(4)

    def __init__(self):
        n_var = 4 + 4 + 16
        eq_row = np.zeros(n_var)
        cols_p, cols_n, cols_m0, cols_m1 = [], [], [], []
        for k in range(n_var):
            coeff = np.zeros(n_var)
            coeff[k] = 1.0
            m0, m1, p = self._unpack(coeff)
            eq_row[k] = np.trace(m0 + m1).real
            cols_p.append(-_svec(_real_embedding(p)))
            cols_n.append(-_svec(_real_embedding(p + self._block(m0, m1))))
            cols_m0.append(-_svec(_real_embedding(m0)))
            cols_m1.append(-_svec(_real_embedding(m1)))
        a = np.vstack(
            [
                eq_row[None, :],
                np.array(cols_p).T,
                np.array(cols_n).T,
                np.array(cols_m0).T,
                np.array(cols_m1).T,
            ]
        )
        q = np.zeros(n_var)
        q[8:12] = 2.0  # 2 tr P
        self._cones = [
            clarabel.ZeroConeT(1),
            clarabel.PSDTriangleConeT(8),
            clarabel.PSDTriangleConeT(8),
            clarabel.PSDTriangleConeT(4),
            clarabel.PSDTriangleConeT(4),
        ]
        settings = clarabel.DefaultSettings()
        settings.verbose = False
        settings.presolve_enable = False
        settings.chordal_decomposition_enable = False
        self._solver = clarabel.DefaultSolver(
            sparse.csc_matrix((n_var, n_var)),
            q,
            sparse.csc_matrix(a),
            self._rhs(np.eye(4) / 4),
            self._cones,
            settings,
        )

    @classmethod
    def _unpack(cls, coeff):
        m0 = np.tensordot(coeff[:4], cls._B2, axes=1)
        m1 = np.tensordot(coeff[4:8], cls._B2, axes=1)
        p = np.tensordot(coeff[8:], cls._B4, axes=1)
        return m0, m1, p

    @staticmethod
    def _block(m0, m1):
        out = np.zeros((4, 4), dtype=complex)
        out[:2, :2] = m0
        out[2:, 2:] = m1
        return out

    @staticmethod
    def _rhs(rho):
        return np.concatenate(
            [[1.0], np.zeros(36), -_svec(_real_embedding(rho)), np.zeros(20)]
        )

    @staticmethod
    def _psd_part(m):
        w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
        return (v * np.clip(w, 0.0, None)) @ v.conj().T

    def distance(self, rho_rotated):
        self._solver.update(b=self._rhs(rho_rotated))
        sol = self._solver.solve()
        m0, m1, _ = self._unpack(np.asarray(sol.x))
        # repair solver slack so the candidate is exactly classical-quantum,
        # then evaluate its distance exactly: the result is a true upper bound
        m0, m1 = self._psd_part(m0), self._psd_part(m1)
        total = np.trace(m0 + m1).real
        if not np.isfinite(total) or total <= 0:
            return math.inf
        chi = self._block(m0, m1) / total
        return float(np.abs(np.linalg.eigvalsh(rho_rotated - chi)).sum())


def _measurement_rotation(theta, phi):
    n = _unit(theta, phi)
    _, v = np.linalg.eigh(np.einsum("i,ijk->jk", n, PAULI[1:]))
    return np.kron(v.conj().T, SIGMA_0)


def tqd_bruteforce(rho, budget=None):
    """Trace-distance discord by direct minimisation.

    The projective measurement on qubit 1 is scanned over a grid of Bloch
    directions and refined with Nelder-Mead; for each direction the optimal
    classical-quantum partner (probabilities and conditional states of
    qubit 2) is found exactly by a semidefinite program.

    Parameters
    ----------
    rho : DensityMatrix, XState or array_like
    budget : TQDBudget, optional

    Returns
    -------
    float
        The smallest distance found. It is attained by an explicit
        classical-quantum state, so it never undercuts the true minimum.
    """
    budget = budget or TQDBudget()
    m = _matrix_of(rho)
    projector = _CQProjector()

    def objective(angles):
        u = _measurement_rotation(*angles)
        return projector.distance(u @ m @ u.conj().T)

    thetas = np.linspace(0.0, 0.5 * math.pi, budget.n_theta // 2 + 1)
    phis = np.linspace(0.0, 2 * math.pi, budget.n_phi, endpoint=False)
    grid = [(0.0, 0.0)] + [(t, p) for t in thetas[1:] for p in phis]
    values = np.array([objective(g) for g in grid])
    best = float(values.min())
    for idx in np.argsort(values)[: budget.n_starts]:
        res = minimize(
            objective,
            np.array(grid[idx]),
            method="Nelder-Mead",
            options=dict(xatol=budget.xatol, fatol=budget.fatol, maxiter=budget.maxiter),
        )
        best = min(best, float(res.fun))
    return _clamp(best)


# ------------------------------------------------------- local quantum uncertainty


def skew_information(rho, k):
    """Wigner-Yanase skew information ``Tr(rho K^2) - Tr(sqrt(rho) K sqrt(rho) K)``."""
    if not isinstance(k, LocalObservable):
        k = LocalObservable(k)
    m = _matrix_of(rho)
    kk = k.matrix()
    root = hermitian_sqrt_generic(m)
    value = np.trace(m @ kk @ kk).real - np.trace(root @ kk @ root @ kk).real
    return max(float(value), 0.0)


def w_matrix(rho):
    """W matrix from an eigendecomposition square root (any state)."""
    root = hermitian_sqrt_generic(rho)
    left = np.einsum("ij,ajk->aik", root, _LOCAL_PAULI)
    w = np.einsum("aij,bji->ab", left, left).real
    return WMatrix(0.5 * (w + w.T))


def w_matrix_x(x):
    """W matrix of an X state from its Fano-Bloch tensor and spectrum.

    With ``s1 = sqrt(l1) + sqrt(l4)`` and ``s2 = sqrt(l2) + sqrt(l3)`` the
    non-zero entries are

        w11 = s1 s2 + [(T11^2 - T22^2) + (T12^2 - T21^2) + (T03^2 - T30^2)] / (4 s1 s2)
        w22 = s1 s2 + [(T22^2 - T11^2) + (T21^2 - T12^2) + (T03^2 - T30^2)] / (4 s1 s2)
        w12 = (T11 T21 + T22 T12) / (2 s1 s2)

    and ``w33`` as implemented below.

    Raises
    ------
    DegenerateBlock
        If either 2x2 block of the state vanishes.
    """
    s1, s2 = block_root_norms(x)
    if s1 * s1 < DEGENERATE_BLOCK_TOL or s2 * s2 < DEGENERATE_BLOCK_TOL:
        raise DegenerateBlock(f"block norms ({s1:.3e}, {s2:.3e}) are numerically zero")
    T = fano_bloch_decompose(x).t
    prod = s1 * s2
    common = T[0, 3] ** 2 - T[3, 0] ** 2
    cross = (T[1, 1] ** 2 - T[2, 2] ** 2) + (T[1, 2] ** 2 - T[2, 1] ** 2)
    w = np.zeros((3, 3))
    w[0, 0] = prod + (cross + common) / (4 * prod)
    w[1, 1] = prod + (-cross + common) / (4 * prod)
    w[2, 2] = (
        0.5 * (s1 * s1 + s2 * s2)
        + ((T[3, 0] + T[0, 3]) ** 2 - (T[1, 1] - T[2, 2]) ** 2 - (T[1, 2] + T[2, 1]) ** 2)
        / (8 * s1 * s1)
        + ((T[0, 3] - T[3, 0]) ** 2 - (T[1, 1] + T[2, 2]) ** 2 - (T[1, 2] - T[2, 1]) ** 2)
        / (8 * s2 * s2)
    )
    w[0, 1] = w[1, 0] = 0.5 * (T[1, 1] * T[2, 1] + T[2, 2] * T[1, 2]) / prod
    return WMatrix(w)


def lqu(rho, method="auto"):
    """Local quantum uncertainty, ``1 - lambda_max(W)``.

    Parameters
    ----------
    rho : DensityMatrix, XState or array_like
    method : {'auto', 'x', 'generic'}
        ``'auto'`` uses the X-state closed form when the input is an
        :class:`XState` whose blocks are non-degenerate, and the generic
        eigendecomposition route otherwise.
    """
    if method not in ("auto", "x", "generic"):
        raise ValueError(f"unknown method {method!r}")
    if method == "generic":
        return w_matrix(rho).lqu()
    x = rho if isinstance(rho, XState) else None
    if x is None and method == "x":
        x = XState.from_matrix(_matrix_of(rho))
    if x is not None:
        try:
            return w_matrix_x(x).lqu()
        except DegenerateBlock:
            if method == "x":
                raise
    return w_matrix(rho).lqu()


def fibonacci_sphere(n_points):
    """Nearly uniform unit vectors on the sphere (golden-angle spiral)."""
    i = np.arange(n_points) + 0.5
    z = 1.0 - 2.0 * i / n_points
    r = np.sqrt(1.0 - z * z)
    phi = math.pi * (3.0 - math.sqrt(5.0)) * i
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def lqu_bruteforce(rho, n_points=10_000, n_starts=3):
    """Minimise the skew information over local observables directly.

    Every point of a Fibonacci sphere is evaluated, then the ``n_starts``
    best directions are polished with Nelder-Mead in spherical angles.
    """
    m = _matrix_of(rho)
    root = hermitian_sqrt_generic(m)
    dirs = fibonacci_sphere(n_points)
    ks = np.einsum("ni,ijk->njk", dirs, _LOCAL_PAULI)
    # K^2 = I, so Tr(rho K^2) = Tr(rho) for every direction
    base = np.trace(m).real
    overlap = np.einsum("ij,njk,kl,nli->n", root, ks, root, ks).real
    values = base - overlap

    def objective(angles):
        return skew_information(m, LocalObservable.from_angles(*angles))

    best = float(values.min())
    for idx in np.argsort(values)[:n_starts]:
        x, y, z = dirs[idx]
        start = np.array([math.acos(np.clip(z, -1, 1)), math.atan2(y, x)])
        res = minimize(
            objective,
            start,
            method="Nelder-Mead",
            options=dict(xatol=1e-9, fatol=1e-14, maxiter=400),
        )
        best = min(best, float(res.fun))
    return _clamp(max(best, 0.0))
