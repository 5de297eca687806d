"""Scenario runs, cross-checks and their CSV/JSON serialisation."""
import io
import json
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    AtomPairGeometry,
    CollectiveParams,
    collective_params,
    collective_to_product,
    default_rk4_steps,
    evolve_closed_form,
    integrate_rk4_trajectory,
)
from .measures import concurrence, lqu, lqu_bruteforce, tqd_bruteforce, tqd_x
from .scenarios import (
    generic_correlations,
    initial_collective_state,
    scenario_correlations,
    scenario_state,
)
from .states import XState

REPORT_COLUMNS = ("tau", "concurrence", "tqd", "lqu", "p_plus", "p_minus")
CHECK_COLUMNS = REPORT_COLUMNS + (
    "state_dev_collective",
    "state_dev_rk4",
    "dev_generic",
    "dev_rk4",
    "tqd_bruteforce",
    "lqu_bruteforce",
    "dev_bruteforce",
    "pass",
)


@dataclass(frozen=True)
class CrossCheckRow:
    """Closed form against its oracles at one time.

    ``state_dev_*`` are max elementwise deviations of the density matrix;
    ``dev_*`` the largest deviation among the three measures. The
    brute-force fields are ``None`` where that oracle was not run.
    """

    report: object
    state_dev_collective: float
    state_dev_rk4: float
    dev_generic: float
    dev_rk4: float
    tqd_bruteforce: float = None
    lqu_bruteforce: float = None
    dev_bruteforce: float = None
    passed: bool = True

    def values(self):
        return self.report.as_tuple() + (
            self.state_dev_collective,
            self.state_dev_rk4,
            self.dev_generic,
            self.dev_rk4,
            self.tqd_bruteforce,
            self.lqu_bruteforce,
            self.dev_bruteforce,
            self.passed,
        )


@dataclass(frozen=True)
class CrossCheckResult:
    rows: list
    passed: bool
    worst: str


def resolve_params(cfg, sweep_value=None):
    """Collective parameters of a run, or of one sweep entry."""
    if cfg.geometry is not None:
        geometry = cfg.geometry
        if sweep_value is not None:
            direction = geometry.separation / geometry.distance
            geometry = AtomPairGeometry(sweep_value * direction, geometry.dipole_direction)
        p = collective_params(geometry)
        if cfg.scenario.near_zero_separation:
            p = CollectiveParams(1.0, p.eta)
        return p
    if sweep_value is not None:
        return CollectiveParams(sweep_value, cfg.params.eta)
    return cfg.params


def run_scenario(cfg, params=None):
    """Closed-form time series for ``cfg``; one report per sample."""
    p = params or resolve_params(cfg)
    return [
        scenario_correlations(cfg.scenario, p.gamma, p.eta, float(t)) for t in cfg.taus()
    ]


def cross_check(cfg, params=None):
    """Compare closed forms with the generic, RK4 and brute-force routes.

    Tolerances come from ``cfg.tolerances``; brute-force oracles run on
    ``cfg.bruteforce_samples`` evenly spaced samples of the grid.
    """
    p = params or resolve_params(cfg)
    tol = cfg.tolerances
    taus = cfg.taus()
    rho0 = scenario_state(cfg.scenario, p.gamma, p.eta, 0.0)
    per_unit = cfg.rk4_steps or default_rk4_steps(1.0, p.eta)
    rk4 = integrate_rk4_trajectory(rho0, p, taus, steps_per_unit=per_unit)
    s0 = initial_collective_state(cfg.scenario.kind)
    n_bf = min(cfg.bruteforce_samples, len(taus))
    bf_idx = set(np.linspace(0, len(taus) - 1, n_bf).round().astype(int)) if n_bf else set()

    rows = []
    worst = (-np.inf, "")
    for i, tau in enumerate(taus):
        tau = float(tau)
        report = scenario_correlations(cfg.scenario, p.gamma, p.eta, tau)
        x = scenario_state(cfg.scenario, p.gamma, p.eta, tau)
        closed = np.array([report.concurrence, report.tqd, report.lqu])

        coll = collective_to_product(evolve_closed_form(s0, p, tau))
        dev_coll = float(np.abs(coll.to_matrix() - x.to_matrix()).max())
        dev_state_rk4 = float(np.abs(rk4[i] - x.to_matrix()).max())
        dev_gen = float(np.abs(closed - generic_correlations(x)).max())
        m = rk4[i]
        rk4_measures = np.array(
            [concurrence(m), tqd_x(XState.from_matrix(m, tol=1e-9)), lqu(m, method="generic")]
        )
        dev_rk4 = float(np.abs(closed - rk4_measures).max())

        checks = [
            ("state (collective)", dev_coll, tol.analytic),
            ("measures (generic)", dev_gen, tol.analytic),
            ("state (rk4)", dev_state_rk4, tol.rk4),
            ("measures (rk4)", dev_rk4, tol.rk4),
        ]
        tqd_bf = lqu_bf = dev_bf = None
        if i in bf_idx:
            tqd_bf = tqd_bruteforce(x)
            lqu_bf = lqu_bruteforce(x)
            dev_bf = max(abs(tqd_bf - report.tqd), abs(lqu_bf - report.lqu))
            checks.append(("measures (brute force)", dev_bf, tol.bruteforce))
        passed = True
        for name, dev, limit in checks:
            ratio = dev / limit
            if ratio > worst[0]:
                worst = (ratio, f"{name} at tau={tau!r}: deviation {dev:.3e} vs tolerance {limit:.1e}")
            passed &= dev <= limit
        rows.append(
            CrossCheckRow(report, dev_coll, dev_state_rk4, dev_gen, dev_rk4,
                          tqd_bf, lqu_bf, dev_bf, bool(passed))
        )
    return CrossCheckResult(rows, all(r.passed for r in rows), worst[1])


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    return repr(float(value))


def _header_lines(cfg, p):
    lines = [f"# scenario={cfg.scenario.kind.value} near_zero={str(cfg.scenario.near_zero_separation).lower()}"]
    lines.append(f"# gamma={p.gamma!r} eta={p.eta!r}")
    if cfg.geometry is not None:
        g = cfg.geometry
        lines.append(
            "# separation=" + ",".join(repr(float(v)) for v in g.separation)
            + " dipole=" + ",".join(repr(float(v)) for v in g.dipole_direction)
        )
    return lines


def _runs(cfg):
    values = cfg.sweep if cfg.sweep else (None,)
    for v in values:
        p = resolve_params(cfg, v)
        if cfg.cross_check:
            result = cross_check(cfg, p)
            yield p, [r.values() for r in result.rows], result
        else:
            yield p, [r.as_tuple() for r in run_scenario(cfg, p)], None


def render(cfg):
    """Run ``cfg`` and serialise it.

    Returns
    -------
    text : str
    verdict : CrossCheckResult or None
        Aggregated over sweep entries when cross-checking.
    """
    columns = CHECK_COLUMNS if cfg.cross_check else REPORT_COLUMNS
    sweeping = bool(cfg.sweep)
    runs = list(_runs(cfg))
    verdict = None
    if cfg.cross_check:
        failed = [res for _, _, res in runs if not res.passed]
        verdict = CrossCheckResult(
            [row for _, _, res in runs for row in res.rows],
            not failed,
            failed[0].worst if failed else runs[0][2].worst,
        )
    if cfg.output_format == "json":
        payload = {
            "scenario": cfg.scenario.kind.value,
            "near_zero": cfg.scenario.near_zero_separation,
            "columns": list(columns),
            "runs": [
                {
                    "gamma": p.gamma,
                    "eta": p.eta,
                    "rows": [dict(zip(columns, _json_values(row))) for row in rows],
                }
                for p, rows, _ in runs
            ],
        }
        if cfg.geometry is not None:
            payload["geometry"] = {
                "separation": [float(v) for v in cfg.geometry.separation],
                "dipole": [float(v) for v in cfg.geometry.dipole_direction],
            }
        if verdict is not None:
            payload["passed"] = verdict.passed
            payload["worst"] = verdict.worst
        return json.dumps(payload, indent=1) + "\n", verdict

    buf = io.StringIO()
    first_p = runs[0][0]
    for line in _header_lines(cfg, first_p):
        buf.write(line + "\n")
    head = (("gamma", "eta") if sweeping else ()) + columns
    buf.write(",".join(head) + "\n")
    for p, rows, _ in runs:
        lead = [repr(p.gamma), repr(p.eta)] if sweeping else []
        for row in rows:
            buf.write(",".join(lead + [_fmt(v) for v in row]) + "\n")
    return buf.getvalue(), verdict


def _json_values(row):
    out = []
    for v in row:
        if v is None or isinstance(v, (bool, np.bool_)):
            out.append(None if v is None else bool(v))
        else:
            out.append(float(v))
    return out
