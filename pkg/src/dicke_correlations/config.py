"""Run configuration: command-line flags and JSON config files."""
import argparse
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import AtomPairGeometry, CollectiveParams
from .exceptions import ConfigError, DickeCorrelationError, ZeroSeparation
from .scenarios import Scenario, ScenarioKind

# JSON keys mirror the long flags
_KEYS = {
    "scenario": str,
    "near-zero": bool,
    "gamma": float,
    "eta": float,
    "separation": None,
    "dipole": None,
    "direction": None,
    "tau-max": float,
    "samples": int,
    "format": str,
    "cross-check": bool,
    "rk4-steps": int,
    "sweep-gamma": str,
    "sweep-separation": str,
    "out": str,
    "analytic-tol": float,
    "rk4-tol": float,
    "bruteforce-tol": float,
    "bruteforce-samples": int,
}


@dataclass(frozen=True)
class Tolerances:
    analytic: float = 1e-10
    rk4: float = 1e-7
    bruteforce: float = 1e-3


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one run.

    Exactly one of ``params`` and ``geometry`` is set, except for the
    coincident-atom scenario which needs neither (``gamma = 1``).
    ``sweep`` holds gamma values (with ``params``) or distances in
    wavelengths (with ``geometry``). ``rk4_steps`` is per unit of ``tau``.
    """

    scenario: Scenario
    params: CollectiveParams = None
    geometry: AtomPairGeometry = None
    tau_max: float = 10.0
    samples: int = 1000
    output_format: str = "csv"
    cross_check: bool = False
    rk4_steps: int = None
    sweep: tuple = None
    out: str = None
    tolerances: Tolerances = field(default_factory=Tolerances)
    bruteforce_samples: int = 5

    def taus(self):
        return np.linspace(0.0, self.tau_max, self.samples)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    p = _Parser(
        prog="dicke-correlations",
        description="Correlation dynamics of two atoms in a common vacuum.",
        argument_default=None,
    )
    p.add_argument("--config", help="JSON file with kebab-case keys; flags override it")
    p.add_argument("--scenario", choices=[k.value for k in ScenarioKind])
    p.add_argument("--near-zero", action="store_true", default=None,
                   help="coincident atoms (gamma = 1)")
    p.add_argument("--gamma", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--separation", help="distance in wavelengths, or x,y,z")
    p.add_argument("--dipole", help="dipole direction x,y,z")
    p.add_argument("--direction", help="axis for a scalar --separation (default 1,0,0)")
    p.add_argument("--tau-max", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--cross-check", action="store_true", default=None)
    p.add_argument("--rk4-steps", type=int, help="RK4 steps per unit tau")
    p.add_argument("--sweep-gamma", help="a:b:step")
    p.add_argument("--sweep-separation", help="a:b:step, in wavelengths")
    p.add_argument("--out")
    p.add_argument("--analytic-tol", type=float)
    p.add_argument("--rk4-tol", type=float)
    p.add_argument("--bruteforce-tol", type=float)
    p.add_argument("--bruteforce-samples", type=int)
    return p


def _read_json(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    for key, value in data.items():
        if key not in _KEYS:
            raise ConfigError(f"{path}: unknown key {key!r}")
        kind = _KEYS[key]
        if kind is bool and not isinstance(value, bool):
            raise ConfigError(f"{path}: key {key!r} must be true or false")
        if kind in (float, int) and (isinstance(value, bool) or not isinstance(value, (int, float))):
            raise ConfigError(f"{path}: key {key!r} must be a number")
        if kind is int and not float(value).is_integer():
            raise ConfigError(f"{path}: key {key!r} must be an integer")
        if kind is str and not isinstance(value, str):
            raise ConfigError(f"{path}: key {key!r} must be a string")
    return data


def _vector(value, name):
    if isinstance(value, str):
        parts = value.split(",")
    elif isinstance(value, (list, tuple)):
        parts = list(value)
    else:
        parts = [value]
    try:
        vec = np.array([float(v) for v in parts])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"--{name}: cannot parse {value!r} as numbers") from exc
    if not np.all(np.isfinite(vec)):
        raise ConfigError(f"--{name}: values must be finite")
    return vec


def _unit_vector(value, name):
    vec = _vector(value, name)
    if vec.size != 3:
        raise ConfigError(f"--{name}: expected three components x,y,z")
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise ConfigError(f"--{name}: vector must be non-zero")
    return vec / norm


def _range(text, name):
    try:
        a, b, step = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise ConfigError(f"--{name}: expected a:b:step, got {text!r}") from exc
    if not step > 0 or b < a or not all(map(math.isfinite, (a, b, step))):
        raise ConfigError(f"--{name}: need finite a <= b and step > 0")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    return tuple(float(a + k * step) for k in range(n))


def parse_config(argv):
    """Build a :class:`RunConfig` from command-line arguments.

    Parameters
    ----------
    argv : list of str
        Flags as they would appear on the command line. ``--config FILE``
        loads a JSON object whose keys are the flag names without dashes;
        explicitly given flags take precedence.

    Raises
    ------
    ConfigError
        The message names the offending flag, key or file line.
    """
    args = vars(build_parser().parse_args(argv))
    merged = {}
    path = args.pop("config")
    if path:
        merged.update(_read_json(path))
    for dest, value in args.items():
        if value is not None:
            merged[dest.replace("_", "-")] = value
    return _from_mapping(merged)


def _from_mapping(m):
    if "scenario" not in m:
        raise ConfigError("--scenario is required")
    try:
        kind = ScenarioKind(m["scenario"])
    except ValueError as exc:
        raise ConfigError(f"--scenario: unknown scenario {m['scenario']!r}") from exc
    near_zero = bool(m.get("near-zero", False))
    scenario = Scenario(kind, near_zero)

    direct = "gamma" in m
    geometric = "separation" in m or "sweep-separation" in m
    if direct and geometric:
        raise ConfigError("--gamma and --separation are mutually exclusive")
    if "dipole" in m and not geometric:
        raise ConfigError("--dipole requires --separation")
    if "sweep-gamma" in m and geometric:
        raise ConfigError("--sweep-gamma cannot be combined with a geometry")
    if "sweep-gamma" in m and near_zero:
        raise ConfigError("--sweep-gamma cannot be combined with --near-zero")
    if near_zero and direct and m["gamma"] != 1.0:
        raise ConfigError("--near-zero fixes gamma = 1; drop --gamma")

    params = geometry = sweep = None
    try:
        if geometric:
            if "eta" in m:
                raise ConfigError("--eta is derived from the geometry; drop it")
            if "dipole" not in m:
                raise ConfigError("--separation requires --dipole")
            dipole = _unit_vector(m["dipole"], "dipole")
            direction = _unit_vector(m.get("direction", "1,0,0"), "direction")
            if "sweep-separation" in m:
                sweep = _range(m["sweep-separation"], "sweep-separation")
                if sweep[0] <= 0:
                    raise ConfigError("--sweep-separation: distances must be positive")
                sep = sweep[0] * direction
            else:
                sep = _vector(m["separation"], "separation")
                if sep.size == 1:
                    sep = sep[0] * direction
                elif sep.size != 3:
                    raise ConfigError("--separation: expected a scalar or x,y,z")
            geometry = AtomPairGeometry(sep, dipole)
            if geometry.distance == 0.0:
                raise ZeroSeparation("--separation: atoms are at the same position")
        elif near_zero:
            params = CollectiveParams(1.0, float(m.get("eta", 0.0)))
        elif direct or "sweep-gamma" in m:
            if "sweep-gamma" in m:
                sweep = _range(m["sweep-gamma"], "sweep-gamma")
                for g in sweep:
                    CollectiveParams(g)
            gamma = sweep[0] if sweep else float(m["gamma"])
            params = CollectiveParams(gamma, float(m.get("eta", 0.0)))
        else:
            raise ConfigError("one of --gamma or --separation is required")
    except DickeCorrelationError:
        # ConfigError and physical-domain errors keep their own type
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    tau_max = float(m.get("tau-max", 10.0))
    if not (math.isfinite(tau_max) and tau_max > 0):
        raise ConfigError("--tau-max must be positive")
    samples = int(m.get("samples", 1000))
    if samples < 2:
        raise ConfigError("--samples must be at least 2")
    fmt = m.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"--format: expected csv or json, got {fmt!r}")
    rk4_steps = m.get("rk4-steps")
    if rk4_steps is not None and int(rk4_steps) < 1:
        raise ConfigError("--rk4-steps must be a positive integer")
    tol = Tolerances(
        float(m.get("analytic-tol", 1e-10)),
        float(m.get("rk4-tol", 1e-7)),
        float(m.get("bruteforce-tol", 1e-3)),
    )
    if min(tol.analytic, tol.rk4, tol.bruteforce) <= 0:
        raise ConfigError("tolerances must be positive")
    bf_samples = int(m.get("bruteforce-samples", 5))
    if bf_samples < 0:
        raise ConfigError("--bruteforce-samples must be non-negative")
    return RunConfig(
        scenario=scenario,
        params=params,
        geometry=geometry,
        tau_max=tau_max,
        samples=samples,
        output_format=fmt,
        cross_check=bool(m.get("cross-check", False)),
        rk4_steps=None if rk4_steps is None else int(rk4_steps),
        sweep=sweep,
        out=m.get("out"),
        tolerances=tol,
        bruteforce_samples=bf_samples,
    )
