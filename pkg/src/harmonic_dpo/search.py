"""Optimum and boundary location along the ``eps1`` axis."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import closedform as cf
from . import oracle
from .closedform import Form
from .errors import BracketSingular, DPOError, InvalidParams, NoCrossing
from .model import SystemParams, working_point_from_eps1

DEFAULT_BRACKET = (0.3, 5.0)  # in units of kappa
SCAN_POINTS = 241
XTOL = 1e-6  # in units of kappa


@dataclass(frozen=True)
class SqueezingOptimum:
    kappa: float
    eps1_star: float
    var_minus_star: float

    @property
    def squeezing_percent(self) -> float:
        return cf.squeezing_percent(self.var_minus_star)


@dataclass(frozen=True)
class EntanglementBoundary:
    kappa: float
    eps1: float
    pipeline: str

    @property
    def ratio(self) -> float:
        return self.eps1 / self.kappa


def _scan(f, kappa: float, bracket, points: int):
    lo, hi = bracket
    if not 0 < lo < hi:
        raise InvalidParams(f"bracket must satisfy 0 < lo < hi, got {bracket}")
    xs, ys = [], []
    for x in np.linspace(lo * kappa, hi * kappa, points):
        try:
            ys.append(f(float(x)))
        except DPOError:
            continue
        xs.append(float(x))
    if not xs:
        raise BracketSingular(f"no evaluable point in [{lo}, {hi}] kappa")
    return np.array(xs), np.array(ys)


def find_optimal_squeezing(
    kappa: float,
    lambda_c: float = 0.5,
    guard: float = cf.DEFAULT_GUARD,
    bracket=DEFAULT_BRACKET,
    scan_points: int = SCAN_POINTS,
) -> SqueezingOptimum:
    """Minimise the reduced minus-quadrature variance over ``eps1``.

    A coarse grid scan picks the best sample, then golden-section search on
    the two neighbouring cells refines ``eps1`` to ``1e-6 kappa``.
    """
    SystemParams(kappa, lambda_c)

    def var_minus(eps1: float) -> float:
        wp = working_point_from_eps1(kappa, lambda_c, eps1)
        return cf.quadrature_variances(wp, Form.REDUCED, guard)[1]

    xs, ys = _scan(var_minus, kappa, bracket, scan_points)
    i = int(np.argmin(ys))
    if i == 0 or i == len(xs) - 1:
        return SqueezingOptimum(kappa, float(xs[i]), float(ys[i]))
    res = optimize.minimize_scalar(
        var_minus,
        bracket=(xs[i - 1], xs[i], xs[i + 1]),
        method="golden",
        options={"xtol": 0.1 * XTOL / max(1.0, xs[i] / kappa)},
    )
    return SqueezingOptimum(kappa, float(res.x), float(res.fun))


def _duan(pipeline: str, kappa: float, lambda_c: float, guard: float):
    if pipeline == "oracle":
        def f(eps1):
            wp = working_point_from_eps1(kappa, lambda_c, eps1)
            return oracle.observables_from_moments(wp, oracle.steady_moments(wp)).duan_sum
        return f
    form = Form(pipeline)

    def g(eps1):
        return cf.duan_sum(working_point_from_eps1(kappa, lambda_c, eps1), form, guard)
    return g


def find_entanglement_boundary(
    kappa: float,
    lambda_c: float = 0.5,
    pipeline: str = "reduced",
    guard: float = cf.DEFAULT_GUARD,
    bracket=DEFAULT_BRACKET,
    scan_points: int = SCAN_POINTS,
) -> EntanglementBoundary:
    """Onset of the large-``eps1`` entangled region, where the Duan sum drops below 2.

    The scan keeps the last downward crossing of 2 inside the bracket, then
    bisects it to ``1e-6 kappa``.  ``pipeline`` is ``"reduced"``,
    ``"general"`` or ``"oracle"``.
    """
    SystemParams(kappa, lambda_c)
    if pipeline not in ("reduced", "general", "oracle"):
        raise InvalidParams(f"unknown pipeline {pipeline!r}")
    duan = _duan(pipeline, kappa, lambda_c, guard)
    xs, ys = _scan(duan, kappa, bracket, scan_points)
    above = ys >= 2.0
    down = np.flatnonzero(above[:-1] & ~above[1:])
    if down.size == 0:
        raise NoCrossing(f"{pipeline} Duan sum does not cross 2 downward in {list(bracket)} kappa")
    i = int(down[-1])
    root = optimize.bisect(lambda x: duan(x) - 2.0, xs[i], xs[i + 1], xtol=0.1 * XTOL * kappa, maxiter=200)
    return EntanglementBoundary(kappa, float(root), pipeline)
