"""scikit-learn style wrappers around the dynamics and the measures.

:class:`DickeEvolution` maps times to states (``predict``) or to
correlation rows (``transform``); :class:`CorrelationTransformer` maps a
batch of density matrices to a feature matrix of correlation measures.
Both are stateless apart from fitted parameter checks, so ``fit`` only
validates.
"""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .dynamics import (
    CollectiveParams,
    default_rk4_steps,
    integrate_rk4_trajectory,
)
from .measures import concurrence, lqu, lqu_bruteforce, tqd_bruteforce, tqd_x
from .scenarios import (
    Scenario,
    ScenarioKind,
    scenario_correlations,
    scenario_state,
)
from .states import XState, validate_density

REPORT_COLUMNS = ("tau", "concurrence", "tqd", "lqu", "p_plus", "p_minus")
MEASURES = ("concurrence", "tqd", "lqu")


def check_taus(taus):
    """Validate a one-dimensional grid of non-negative, finite times."""
    arr = np.asarray(taus, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-d array of times, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("at least one time is required")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError("times must be finite and non-negative")
    return arr


def check_density_batch(X):
    """Validate a stack of 4x4 density matrices.

    Accepts shape ``(n, 4, 4)`` or ``(n, 16)`` (row-major flattening);
    complex entries are kept, unlike ``sklearn.utils.check_array``.

    Returns
    -------
    ndarray, shape (n, 4, 4), complex
    """
    arr = np.asarray(X, dtype=complex)
    if arr.ndim == 2 and arr.shape[1] == 16:
        arr = arr.reshape(-1, 4, 4)
    if arr.ndim == 2 and arr.shape == (4, 4):
        arr = arr[None]
    if arr.ndim != 3 or arr.shape[1:] != (4, 4):
        raise ValueError(f"expected density matrices of shape (n, 4, 4), got {arr.shape}")
    return np.array([validate_density(m).entries for m in arr])


class CorrelationTransformer(TransformerMixin, BaseEstimator):
    """Feature extractor: density matrices to correlation measures.

    Parameters
    ----------
    measures : tuple of str
        Subset of ``('concurrence', 'tqd', 'lqu')``, in output column order.
    bruteforce : bool
        Use the numerical minimisation oracles for discord and LQU instead
        of the closed forms. Slow; meant for validation.
    """

    def __init__(self, measures=MEASURES, bruteforce=False):
        self.measures = measures
        self.bruteforce = bruteforce

    def fit(self, X, y=None):
        unknown = set(self.measures) - set(MEASURES)
        if unknown or not self.measures:
            raise ValueError(f"unknown measures {sorted(unknown)}; choose from {MEASURES}")
        check_density_batch(X)
        self.n_features_in_ = 16
        self.feature_names_out_ = np.array(self.measures, dtype=object)
        return self

    def _one(self, m, name):
        if name == "concurrence":
            return concurrence(m)
        if name == "tqd":
            if self.bruteforce:
                return tqd_bruteforce(m)
            return tqd_x(XState.from_matrix(m))
        return lqu_bruteforce(m) if self.bruteforce else lqu(m, method="generic")

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        mats = check_density_batch(X)
        return np.array([[self._one(m, name) for name in self.measures] for m in mats])

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "feature_names_out_")
        return self.feature_names_out_


class DickeEvolution(TransformerMixin, BaseEstimator):
    """Two-atom collective decay from one of the scenario initial states.

    Parameters
    ----------
    scenario : str
        ``'bell-zero-double'``, ``'single-excitation'`` or ``'symmetric'``.
    gamma, eta : float
        Collective damping and dipole-dipole shift in units of ``Gamma``.
    near_zero : bool
        Coincident atoms; forces ``gamma = 1``.
    method : {'closed-form', 'rk4'}
        How :meth:`predict` obtains the states.
    rk4_steps : int, optional
        RK4 steps per unit time (default ``2000 max(1, |eta|)``).
    """

    def __init__(
        self,
        scenario="symmetric",
        gamma=0.0,
        eta=0.0,
        near_zero=False,
        method="closed-form",
        rk4_steps=None,
    ):
        self.scenario = scenario
        self.gamma = gamma
        self.eta = eta
        self.near_zero = near_zero
        self.method = method
        self.rk4_steps = rk4_steps

    def fit(self, X=None, y=None):
        if self.method not in ("closed-form", "rk4"):
            raise ValueError(f"method must be 'closed-form' or 'rk4', got {self.method!r}")
        if self.rk4_steps is not None and int(self.rk4_steps) < 1:
            raise ValueError("rk4_steps must be a positive integer")
        self.scenario_ = Scenario(ScenarioKind(self.scenario), bool(self.near_zero))
        gamma = 1.0 if self.near_zero else float(self.gamma)
        self.params_ = CollectiveParams(gamma, float(self.eta))
        return self

    def predict(self, X):
        """Density matrices, shape ``(n, 4, 4)``, at the times in ``X``."""
        check_is_fitted(self, "params_")
        taus = check_taus(X)
        p = self.params_
        if self.method == "closed-form":
            return np.array(
                [scenario_state(self.scenario_, p.gamma, p.eta, t).to_matrix() for t in taus]
            )
        order = np.argsort(taus, kind="stable")
        rho0 = scenario_state(self.scenario_, p.gamma, p.eta, 0.0)
        per_unit = self.rk4_steps or default_rk4_steps(1.0, p.eta)
        traj = integrate_rk4_trajectory(rho0, p, taus[order], steps_per_unit=per_unit)
        out = np.empty_like(traj)
        out[order] = traj
        return out

    def transform(self, X):
        """Closed-form correlation rows with columns :data:`REPORT_COLUMNS`."""
        check_is_fitted(self, "params_")
        taus = check_taus(X)
        p = self.params_
        return np.array(
            [scenario_correlations(self.scenario_, p.gamma, p.eta, t).as_tuple() for t in taus]
        )

    def get_feature_names_out(self, input_features=None):
        return np.array(REPORT_COLUMNS, dtype=object)
