"""Closed-form vs moment-equation comparison report.

For every grid point each quantity is evaluated by up to three pipelines:
the general closed form, the reduced (above-threshold) closed form and the
moment-equation oracle.  Any pairwise relative difference above
``tol`` becomes a flag; so does any closed-form value that breaks a bound
every physical state must satisfy (negative photon number, uncertainty
product below one, ...).  Nothing is suppressed: known disagreements show up
in the flags like any other.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

from . import closedform as cf
from . import oracle
from .closedform import Form
from .errors import DPOError
from .model import Regime, WorkingPoint
from .sweep import SweepSpec, _map

DEFAULT_TOL = 1e-6
REL_FLOOR = 1e-9
TOP_K = 10
PIPELINES = ("closed_general", "closed_reduced", "oracle")


def rel_diff(x: float, y: float) -> float:
    return abs(x - y) / max(abs(x), abs(y), REL_FLOOR)


def region(wp: WorkingPoint) -> str:
    """Coarse label of where a point sits relative to the known trouble spots."""
    if wp.regime is Regime.BELOW:
        return "below_threshold"
    x = abs(wp.eps1) / wp.kappa
    if x < 0.05:
        return "near_threshold"
    if abs(x - 0.25) < 0.05:
        return "near_quarter_kappa_pole"
    return "hyperbolic" if x < 0.25 else "oscillatory"


def _try(fn):
    try:
        value = fn()
    except DPOError as exc:
        return None, type(exc).__name__
    return float(value), None


def _oracle_quantities(wp: WorkingPoint) -> dict:
    """Steady-state oracle values plus the vacuum-start mean-field check."""
    try:
        ms = oracle.steady_moments(wp)
    except DPOError as exc:
        return {"_error": type(exc).__name__}
    obs = oracle.observables_from_moments(wp, ms)
    N = ms.N
    out = {
        "duan_sum": obs.duan_sum,
        "var_plus": obs.var_plus,
        "var_minus": obs.var_minus,
        "nbar": obs.mean_photon,
        "delta_I": obs.intensity_diff,
        "nbar_coherent": 0.5 * (wp.alpha + wp.beta) ** 2,
        "noise_ff": N[oracle.AD, oracle.A],
        "noise_gg": N[oracle.BD, oracle.B],
        "noise_fg": N[oracle.A, oracle.B],
        "noise_ab_cross": N[oracle.AD, oracle.B],
    }
    start = oracle.vacuum_state(wp)
    t1 = 1.0 / wp.kappa
    later = oracle.integrate_moments(wp, start, t1)
    out["mean_a_initial"] = wp.alpha + start.m[oracle.A]
    out["mean_b_initial"] = wp.beta + start.m[oracle.B]
    out["mean_a_transient"] = wp.alpha + later.m[oracle.A]
    out["mean_b_transient"] = wp.beta + later.m[oracle.B]
    return out


def _closed_quantities(wp: WorkingPoint, form: Form, guard: float) -> dict:
    out = {
        "duan_sum": _try(lambda: cf.duan_sum(wp, form, guard)),
        "var_plus": _try(lambda: cf.quadrature_variances(wp, form, guard)[0]),
        "var_minus": _try(lambda: cf.quadrature_variances(wp, form, guard)[1]),
        "nbar": _try(lambda: cf.mean_photon_number(wp, form, guard)),
        "delta_I": _try(lambda: cf.intensity_difference(wp, form, guard)),
        "nbar_coherent": _try(lambda: cf.coherent_photon_number(wp, form)),
    }
    if form is Form.GENERAL:
        try:
            nm, failure = cf.steady_noise_moments(wp, guard), None
        except DPOError as exc:
            nm, failure = None, type(exc).__name__
        for name in ("ff", "gg", "fg", "ab_cross"):
            out[f"noise_{name}"] = (getattr(nm, name), None) if nm else (None, failure)
        t1 = 1.0 / wp.kappa
        out["mean_a_initial"] = _try(lambda: cf.mean_fields(wp, 0.0, guard)[0])
        out["mean_b_initial"] = _try(lambda: cf.mean_fields(wp, 0.0, guard)[1])
        out["mean_a_transient"] = _try(lambda: cf.mean_fields(wp, t1, guard)[0])
        out["mean_b_transient"] = _try(lambda: cf.mean_fields(wp, t1, guard)[1])
    return out


QUANTITIES = (
    "duan_sum",
    "var_plus",
    "var_minus",
    "nbar",
    "delta_I",
    "nbar_coherent",
    "noise_ff",
    "noise_gg",
    "noise_fg",
    "noise_ab_cross",
    "mean_a_initial",
    "mean_b_initial",
    "mean_a_transient",
    "mean_b_transient",
)


def _bound_violations(name: str, pipeline: str, value: float, seen: dict) -> list[tuple[str, float]]:
    out = []
    if name == "duan_sum" and value <= 0:
        out.append(("non_positive", value))
    if name in ("var_plus", "var_minus") and value <= 0:
        out.append(("non_positive", value))
    if name == "var_minus":
        plus = seen.get("var_plus", {}).get(pipeline)
        if plus is not None and plus * value < 1 - 1e-9:
            out.append(("uncertainty_product_below_one", plus * value))
    if name in ("nbar", "noise_ff", "noise_gg") and value < -1e-9:
        out.append(("negative", value))
    return out


def validate_point(wp: WorkingPoint, forms=(Form.GENERAL, Form.REDUCED), guard: float = cf.DEFAULT_GUARD, tol: float = DEFAULT_TOL) -> dict:
    """Compare all pipelines at one working point.

    Returns a JSON-ready dict with per-quantity values, pairwise differences
    and the flags raised at this point.
    """
    forms = {Form(f) for f in forms}
    sources = {"oracle": _oracle_quantities(wp)}
    for form in (Form.GENERAL, Form.REDUCED):
        if form in forms:
            sources[f"closed_{form.value}"] = _closed_quantities(wp, form, guard)
    reg = region(wp)
    base = {"kappa": wp.kappa, "eps1": wp.eps1, "drive": wp.params.epsilon_d, "regime": wp.regime.value, "region": reg}
    quantities, flags, comparisons = {}, [], []
    oracle_error = sources["oracle"].get("_error")
    for name in QUANTITIES:
        record, errors = {}, {}
        for pipe in PIPELINES:
            if pipe not in sources:
                continue
            if pipe == "oracle":
                value = sources["oracle"].get(name)
                err = oracle_error
            else:
                value, err = sources[pipe].get(name, (None, None))
            if value is not None:
                record[pipe] = value
            elif err is not None:
                errors[pipe] = err
        if not record and not errors:
            continue
        pairs = {}
        for p1, p2 in combinations([p for p in PIPELINES if p in record], 2):
            a, d = abs(record[p1] - record[p2]), rel_diff(record[p1], record[p2])
            key = f"{p1.replace('closed_', '')}~{p2.replace('closed_', '')}"
            pairs[key] = {"abs_diff": a, "rel_diff": d}
            comparisons.append({**base, "quantity": name, "pair": key, "abs_diff": a, "rel_diff": d})
            if d > tol:
                flags.append({**base, "id": f"{name}:{key}", "kind": "pipeline_disagreement", "magnitude": d})
        for pipe, value in record.items():
            if pipe == "oracle":
                continue
            for kind, magnitude in _bound_violations(name, pipe, value, quantities):
                flags.append({**base, "id": f"{name}:{pipe.replace('closed_', '')}:{kind}", "kind": "bound_violation", "magnitude": magnitude})
        entry = {
            "closed_general": record.get("closed_general"),
            "closed_reduced": record.get("closed_reduced"),
            "oracle": record.get("oracle"),
            "abs_diff": max((v["abs_diff"] for v in pairs.values()), default=None),
            "rel_diff": max((v["rel_diff"] for v in pairs.values()), default=None),
            "pairs": pairs,
        }
        if errors:
            entry["errors"] = errors
        quantities[name] = entry
    evaluated = any(
        q.get(p) is not None for q in quantities.values() for p in PIPELINES
    )
    return {**base, "evaluated": evaluated, "quantities": quantities, "flags": flags, "comparisons": comparisons}


@dataclass
class ValidationReport:
    spec: dict
    tol: float
    grid: list[dict]
    points: list[dict]
    worst_offenders: list[dict]
    flags: list[dict]
    skipped: list[dict] = field(default_factory=list)

    def summary(self) -> dict:
        by_id: dict[str, int] = {}
        for f in self.flags:
            key = f["id"]
            by_id[key] = by_id.get(key, 0) + 1
        return {
            "grid_size": len(self.grid),
            "evaluated_points": len(self.points),
            "skipped_points": len(self.skipped),
            "flag_count": len(self.flags),
            "flags_by_id": dict(sorted(by_id.items())),
        }

    def flagged(self, kappa: float, eps1: float, quantity: str | None = None) -> list[dict]:
        out = [f for f in self.flags if f["kappa"] == kappa and f["eps1"] == eps1]
        if quantity is not None:
            out = [f for f in out if f["id"].split(":")[0] == quantity]
        return out

    def to_dict(self) -> dict:
        return _clean(
            {
                "metadata": {"config": self.spec, "tol": self.tol, "summary": self.summary()},
                "grid": self.grid,
                "points": self.points,
                "worst_offenders": self.worst_offenders,
                "flags": self.flags,
                "skipped": self.skipped,
            }
        )

    def write_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1, allow_nan=False) + "\n")


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def validate(spec: SweepSpec, tol: float = DEFAULT_TOL, top_k: int = TOP_K, workers: int | None = None) -> ValidationReport:
    items = spec.working_points()
    results = _map(lambda item: validate_point(item[2], spec.forms, spec.guard, tol), items, workers)
    grid, points, flags, comparisons, skipped = [], [], [], [], []
    for (kappa, x, wp), res in zip(items, results):
        grid.append({"kappa": kappa, "value": x, "eps1": wp.eps1, "drive": wp.params.epsilon_d})
        if not res["evaluated"]:
            skipped.append({"kappa": kappa, "value": x, "eps1": wp.eps1, "reason": "no pipeline produced a value"})
            continue
        flags.extend(res.pop("flags"))
        comparisons.extend(res.pop("comparisons"))
        res.pop("evaluated")
        points.append(res)
    comparisons.sort(key=lambda c: (-c["rel_diff"], c["kappa"], c["eps1"], c["quantity"], c["pair"]))
    return ValidationReport(spec.to_dict(), tol, grid, points, comparisons[:top_k], flags, skipped)
