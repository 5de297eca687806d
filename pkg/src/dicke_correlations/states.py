"""Two-qubit density matrices, X states and their Fano-Bloch data.

Basis ordering used throughout the package is the product basis

    |1> = |e1 e2>,  |2> = |e1 g2>,  |3> = |g1 e2>,  |4> = |g1 g2>

with the excited level first on each qubit, so ``sigma_z |e> = +|e>``.
"""
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DegenerateBlock,
    NegativeDiscriminant,
    NonHermitian,
    NotPositiveSemidefinite,
    NotXState,
    TraceNotOne,
)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
X_SHAPE_TOL = 1e-12
DEGENERATE_BLOCK_TOL = 1e-14
# eigenvalues (or 2x2 determinants, relative to t**2) below this are rounding
# noise; square roots of them would inflate 1e-17 into 3e-9
RANK_RTOL = 8 * np.finfo(float).eps

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.stack([SIGMA_0, SIGMA_X, SIGMA_Y, SIGMA_Z])
# PAULI_PRODUCTS[a, b] = sigma_a (x) sigma_b
PAULI_PRODUCTS = np.einsum("aij,bkl->abikjl", PAULI, PAULI).reshape(4, 4, 4, 4)

_X_MASK = np.array(
    [[1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 1, 0], [1, 0, 0, 1]], dtype=bool
)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated 4x4 two-qubit density operator.

    Build instances with :func:`validate_density`; the constructor itself
    does not check anything.
    """

    entries: np.ndarray

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.entries)

    def is_x_shaped(self, tol=X_SHAPE_TOL):
        return bool(np.all(np.abs(self.entries[~_X_MASK]) <= tol))


@dataclass(frozen=True)
class XState:
    """Seven-parameter X-shaped two-qubit state.

    Populations ``p11..p44`` are the diagonal of the density matrix and
    ``c14 = rho[0, 3]``, ``c23 = rho[1, 2]`` the anti-diagonal coherences.
    """

    p11: float
    p22: float
    p33: float
    p44: float
    c14: complex = 0.0
    c23: complex = 0.0

    def __post_init__(self):
        pops = np.array([self.p11, self.p22, self.p33, self.p44], dtype=float)
        if not np.all(np.isfinite(pops)) or not (
            np.isfinite(self.c14) and np.isfinite(self.c23)
        ):
            raise NotPositiveSemidefinite("X state has non-finite entries")
        total = pops.sum()
        if abs(total - 1.0) > TRACE_TOL:
            raise TraceNotOne(f"populations sum to {total!r}", abs(total - 1.0))
        if pops.min() < -PSD_TOL:
            raise NotPositiveSemidefinite(
                f"negative population {pops.min():.3e}", -pops.min()
            )
        for name, c, (p, q) in (
            ("c14", self.c14, (self.p11, self.p44)),
            ("c23", self.c23, (self.p22, self.p33)),
        ):
            # lowest eigenvalue of the 2x2 block as (pq - |c|^2) / lambda_max,
            # free of the cancellation in (p + q)/2 - sqrt(...)
            lam_max = 0.5 * (p + q) + math.hypot(0.5 * (p - q), abs(c))
            lam_min = (p * q - abs(c) ** 2) / lam_max if lam_max > 0 else 0.0
            if lam_min < -PSD_TOL:
                raise NotPositiveSemidefinite(
                    f"block with coherence {name} has eigenvalue {lam_min:.3e}",
                    -lam_min,
                )

    @property
    def populations(self):
        return np.array([self.p11, self.p22, self.p33, self.p44])

    def to_matrix(self):
        c14, c23 = complex(self.c14), complex(self.c23)
        return np.array(
            [
                [self.p11, 0, 0, c14],
                [0, self.p22, c23, 0],
                [0, c23.conjugate(), self.p33, 0],
                [c14.conjugate(), 0, 0, self.p44],
            ],
            dtype=complex,
        )

    def to_density(self):
        return DensityMatrix(self.to_matrix())

    @classmethod
    def from_matrix(cls, m, tol=X_SHAPE_TOL):
        """Read an X state off a 4x4 matrix, rejecting non-X entries."""
        m = np.asarray(getattr(m, "entries", m), dtype=complex)
        off = np.abs(m[~_X_MASK])
        if off.size and off.max() > tol:
            raise NotXState(
                f"entry of magnitude {off.max():.3e} outside the X pattern",
                float(off.max()),
            )
        d = m.diagonal().real
        return cls(
            float(d[0]),
            float(d[1]),
            float(d[2]),
            float(d[3]),
            complex(0.5 * (m[0, 3] + np.conj(m[3, 0]))),
            complex(0.5 * (m[1, 2] + np.conj(m[2, 1]))),
        )


@dataclass(frozen=True, eq=False)
class FanoBlochTensor:
    """Coefficients ``t[a, b] = Tr(rho sigma_a (x) sigma_b)``, a, b in 0..3."""

    t: np.ndarray

    def __getitem__(self, index):
        return self.t[index]

    def reconstruct(self):
        return fano_bloch_reconstruct(self.t)


@dataclass(frozen=True)
class XSpectralData:
    t1: float
    d1: float
    t2: float
    d2: float
    lambdas: tuple


def validate_density(m):
    """Check a 4x4 matrix against the density-operator invariants.

    The Hermitian part is taken once the anti-Hermitian residue is below
    tolerance, so rounding asymmetries never survive into later stages.

    Parameters
    ----------
    m : array_like, shape (4, 4)

    Returns
    -------
    DensityMatrix

    Raises
    ------
    NonHermitian, TraceNotOne, NotPositiveSemidefinite
        Each carries the offending magnitude as ``.magnitude``.
    """
    m = np.asarray(getattr(m, "entries", m), dtype=complex)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NotPositiveSemidefinite("matrix has non-finite entries")
    skew = np.abs(m - m.conj().T).max()
    if skew > HERMITIAN_TOL:
        raise NonHermitian(f"max |m - m^dagger| = {skew:.3e}", float(skew))
    m = 0.5 * (m + m.conj().T)
    trace = np.trace(m).real
    if abs(trace - 1.0) > TRACE_TOL:
        raise TraceNotOne(f"trace is {trace!r}", abs(trace - 1.0))
    lowest = np.linalg.eigvalsh(m).min()
    if lowest < -PSD_TOL:
        raise NotPositiveSemidefinite(
            f"smallest eigenvalue {lowest:.3e}", float(-lowest)
        )
    return DensityMatrix(m)


def as_density(rho):
    """Coerce a DensityMatrix, XState or raw array into a DensityMatrix."""
    if isinstance(rho, DensityMatrix):
        return rho
    if isinstance(rho, XState):
        return rho.to_density()
    return validate_density(rho)


def _matrix_of(rho):
    if isinstance(rho, XState):
        return rho.to_matrix()
    return np.asarray(getattr(rho, "entries", rho), dtype=complex)


def fano_bloch_decompose(rho):
    """Pauli-product expansion coefficients of a two-qubit operator."""
    m = _matrix_of(rho)
    t = np.einsum("abij,ji->ab", PAULI_PRODUCTS, m).real
    return FanoBlochTensor(t)


def fano_bloch_reconstruct(t):
    """Inverse of :func:`fano_bloch_decompose`: ``(1/4) sum t_ab s_a (x) s_b``."""
    t = np.asarray(getattr(t, "t", t), dtype=float)
    return 0.25 * np.einsum("ab,abij->ij", t, PAULI_PRODUCTS)


def remove_x_phases(x):
    """Rotate away the coherence phases with local z rotations.

    The populations are untouched and both coherences become their moduli;
    all local-unitary invariants (spectrum, correlation measures) are kept.
    """
    return XState(x.p11, x.p22, x.p33, x.p44, abs(x.c14), abs(x.c23))


def _block_eigen(t, d):
    disc = t * t - 4.0 * d
    if disc < -PSD_TOL:
        raise NegativeDiscriminant(f"t^2 - 4d = {disc:.3e}", -disc)
    root = np.sqrt(max(disc, 0.0))
    return 0.5 * (t + root), 0.5 * (t - root)


def x_spectrum(x):
    """Closed-form eigenvalues of an X state.

    The two 2x2 blocks {|1>, |4>} and {|2>, |3>} have trace ``t1``, ``t2``
    and determinant ``d1``, ``d2``; ``lambdas`` are ordered
    ``(l1, l2, l3, l4)`` with ``l1 >= l4`` from the outer block and
    ``l2 >= l3`` from the inner one.
    """
    t1 = x.p11 + x.p44
    d1 = x.p11 * x.p44 - abs(x.c14) ** 2
    t2 = x.p22 + x.p33
    d2 = x.p22 * x.p33 - abs(x.c23) ** 2
    l1, l4 = _block_eigen(t1, d1)
    l2, l3 = _block_eigen(t2, d2)
    return XSpectralData(t1, d1, t2, d2, (l1, l2, l3, l4))


def _clean_det(t, d):
    # determinants at rounding level are exact zeros (rank-deficient block)
    return 0.0 if d <= RANK_RTOL * t * t else d


def block_root_norms(x):
    """``(sqrt(t1 + 2 sqrt(d1)), sqrt(t2 + 2 sqrt(d2)))``.

    These equal ``sqrt(l1) + sqrt(l4)`` and ``sqrt(l2) + sqrt(l3)`` but avoid
    taking square roots of eigenvalues that are zero up to rounding.
    """
    spectrum = x_spectrum(x)
    s1 = np.sqrt(max(spectrum.t1 + 2.0 * np.sqrt(_clean_det(spectrum.t1, spectrum.d1)), 0.0))
    s2 = np.sqrt(max(spectrum.t2 + 2.0 * np.sqrt(_clean_det(spectrum.t2, spectrum.d2)), 0.0))
    return s1, s2


def _block_norms_checked(x):
    """Block norms ``t + 2 sqrt(d)`` and cleaned determinants.

    A block that is exactly zero has a zero root and is allowed; one that is
    merely tiny cannot be normalised reliably and raises.
    """
    spectrum = x_spectrum(x)
    d1 = _clean_det(spectrum.t1, spectrum.d1)
    d2 = _clean_det(spectrum.t2, spectrum.d2)
    n1 = spectrum.t1 + 2.0 * np.sqrt(d1)
    n2 = spectrum.t2 + 2.0 * np.sqrt(d2)
    for n in (n1, n2):
        if 0.0 < n < DEGENERATE_BLOCK_TOL or n < 0.0:
            raise DegenerateBlock(
                f"block norms t+2sqrt(d) = ({n1:.3e}, {n2:.3e}) are numerically zero"
            )
    return n1, n2, d1, d2


def _over(num, s):
    # contributions of an exactly-zero block vanish
    return num / s if s > 0.0 else 0.0 * num


def sqrt_x(x):
    """Principal square root of an X state in closed form.

    Each 2x2 block ``B`` with trace ``t`` and determinant ``d`` has root
    ``(B + sqrt(d) I) / sqrt(t + 2 sqrt(d))``; an exactly-zero block has a
    zero root.

    Raises
    ------
    DegenerateBlock
        If a block is non-zero but numerically negligible
        (``t + 2 sqrt(d) < 1e-14``); use :func:`hermitian_sqrt_generic`.
    """
    n1, n2, d1, d2 = _block_norms_checked(x)
    s1, s2 = np.sqrt(n1), np.sqrt(n2)
    r1, r2 = np.sqrt(d1), np.sqrt(d2)
    c14, c23 = complex(x.c14), complex(x.c23)
    return np.array(
        [
            [_over(x.p11 + r1, s1), 0, 0, _over(c14, s1)],
            [0, _over(x.p22 + r2, s2), _over(c23, s2), 0],
            [0, _over(c23.conjugate(), s2), _over(x.p33 + r2, s2), 0],
            [_over(c14.conjugate(), s1), 0, 0, _over(x.p44 + r1, s1)],
        ],
        dtype=complex,
    )


def sqrt_fano_bloch(x):
    """Fano-Bloch coefficients ``R[a, b] = Tr(sqrt(rho) s_a (x) s_b)``.

    Evaluated from the state's own coefficients ``T`` and the block norms,
    without forming the matrix root. Valid for complex coherences as well.
    """
    n1, n2, _, _ = _block_norms_checked(x)
    s1, s2 = np.sqrt(n1), np.sqrt(n2)
    T = fano_bloch_decompose(x).t
    R = np.zeros((4, 4))
    R[0, 0] = s1 + s2
    R[3, 3] = s1 - s2
    outer = 0.5 * _over(T[3, 0] + T[0, 3], s1)
    inner = 0.5 * _over(T[3, 0] - T[0, 3], s2)
    R[0, 3] = outer - inner
    R[3, 0] = outer + inner
    inner = 0.5 * _over(T[1, 1] + T[2, 2], s2)
    outer = 0.5 * _over(T[1, 1] - T[2, 2], s1)
    R[1, 1] = inner + outer
    R[2, 2] = inner - outer
    inner = 0.5 * _over(T[1, 2] - T[2, 1], s2)
    outer = 0.5 * _over(T[1, 2] + T[2, 1], s1)
    R[1, 2] = inner + outer
    R[2, 1] = outer - inner
    return FanoBlochTensor(R)


def hermitian_sqrt_generic(rho):
    """Principal square root through an eigendecomposition.

    Eigenvalues within rounding of zero are set to exactly zero; negative
    ones beyond the PSD tolerance raise.
    """
    m = _matrix_of(rho)
    m = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(m)
    if w.min() < -PSD_TOL:
        raise NotPositiveSemidefinite(
            f"smallest eigenvalue {w.min():.3e}", float(-w.min())
        )
    floor = RANK_RTOL * max(w.max(), 0.0)
    w = np.where(w <= floor, 0.0, w)
    return (v * np.sqrt(w)) @ v.conj().T


def bell_state(kind="phi+"):
    """Density matrix of one of the four Bell states."""
    vecs = {
        "phi+": [1, 0, 0, 1],
        "phi-": [1, 0, 0, -1],
        "psi+": [0, 1, 1, 0],
        "psi-": [0, 1, -1, 0],
    }
    psi = np.array(vecs[kind], dtype=complex) / np.sqrt(2)
    return DensityMatrix(np.outer(psi, psi.conj()))
