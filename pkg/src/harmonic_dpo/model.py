"""Physical parameters and the semiclassical steady state of the driven
degenerate parametric oscillator.

Two cavity modes are involved: the fundamental ``a`` at frequency w and the
second harmonic ``b`` at 2w, both damped at the same rate ``kappa``.  The
coherent drive ``epsilon_d`` pumps ``b``; the crystal couples the modes at
rate ``lambda_c``.  Above threshold the steady state is

    alpha = eps1 / lambda_c,   beta = kappa / (2 lambda_c),
    eps1  = +/- sqrt(2 lambda_c epsilon_d - kappa**2 / 2),   eps2 = kappa / 2,

and below threshold ``alpha = 0``, ``beta = 2 epsilon_d / kappa``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import InvalidParams

AT_THRESHOLD_RTOL = 1e-12


class Regime(str, enum.Enum):
    BELOW = "below"
    AT = "at"
    ABOVE = "above"


@dataclass(frozen=True)
class SystemParams:
    """Rates defining one oscillator instance, in arbitrary inverse-time units."""

    kappa: float
    lambda_c: float
    epsilon_d: float = 0.0

    def __post_init__(self):
        for name in ("kappa", "lambda_c", "epsilon_d"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise InvalidParams(f"{name} must be a finite real number, got {value!r}")
        if self.kappa <= 0:
            raise InvalidParams(f"kappa must be > 0, got {self.kappa}")
        if self.lambda_c <= 0:
            raise InvalidParams(f"lambda_c must be > 0, got {self.lambda_c}")
        if self.epsilon_d < 0:
            raise InvalidParams(f"epsilon_d must be >= 0, got {self.epsilon_d}")


@dataclass(frozen=True)
class WorkingPoint:
    """Semiclassical steady state about which the fluctuations are linearized.

    ``eps1 = lambda_c * alpha`` and ``eps2 = lambda_c * beta`` are the
    effective couplings entering the fluctuation equations.
    """

    params: SystemParams
    regime: Regime
    alpha: float
    beta: float
    eps1: float
    eps2: float
    branch: int = 1

    @property
    def kappa(self) -> float:
        return self.params.kappa

    @property
    def lambda_c(self) -> float:
        return self.params.lambda_c

    def residuals(self) -> tuple[float, float]:
        """Residuals of the two mean-field balance conditions."""
        lam, kappa = self.params.lambda_c, self.params.kappa
        r1 = lam * self.alpha * self.beta - 0.5 * kappa * self.alpha
        r2 = lam * self.alpha**2 + kappa * self.beta - 2.0 * self.params.epsilon_d
        return r1, r2


def threshold_drive(params: SystemParams) -> float:
    """Drive at which the trivial solution loses stability, ``kappa**2 / (4 lambda_c)``."""
    return params.kappa**2 / (4.0 * params.lambda_c)


def classify_regime(params: SystemParams, rtol: float = AT_THRESHOLD_RTOL) -> Regime:
    eth = threshold_drive(params)
    if abs(params.epsilon_d - eth) <= rtol * eth:
        return Regime.AT
    return Regime.ABOVE if params.epsilon_d > eth else Regime.BELOW


def _check_branch(branch: int) -> int:
    if branch not in (1, -1):
        raise InvalidParams(f"branch must be +1 or -1, got {branch!r}")
    return int(branch)


def solve_steady_state(
    params: SystemParams, branch: int = 1, rtol: float = AT_THRESHOLD_RTOL
) -> WorkingPoint:
    """Solve the mean-field balance for ``params``.

    ``branch`` selects the sign of the fundamental amplitude above threshold;
    it is recorded but has no effect at or below threshold.
    """
    branch = _check_branch(branch)
    lam, kappa, eps = params.lambda_c, params.kappa, params.epsilon_d
    regime = classify_regime(params, rtol)
    if regime is Regime.ABOVE:
        eps1 = branch * math.sqrt(2.0 * lam * eps - 0.5 * kappa**2)
        return WorkingPoint(params, regime, eps1 / lam, kappa / (2.0 * lam), eps1, 0.5 * kappa, branch)
    if regime is Regime.AT:
        return WorkingPoint(params, regime, 0.0, kappa / (2.0 * lam), 0.0, 0.5 * kappa, branch)
    beta = 2.0 * eps / kappa
    return WorkingPoint(params, regime, 0.0, beta, 0.0, lam * beta, branch)


def drive_for_eps1(kappa: float, lambda_c: float, eps1: float) -> float:
    """Drive amplitude that produces the above-threshold coupling ``eps1``."""
    return (eps1**2 + 0.5 * kappa**2) / (2.0 * lambda_c)


def working_point_from_eps1(kappa: float, lambda_c: float, eps1: float) -> WorkingPoint:
    """Build the steady state directly from the down-conversion coupling.

    The sign of ``eps1`` selects the branch.  ``eps1 = 0`` is the threshold
    point.  Constructing from ``eps1`` avoids the square-root round trip
    through the drive amplitude, so ``eps1`` is reproduced exactly.
    """
    params = SystemParams(kappa, lambda_c, drive_for_eps1(kappa, lambda_c, eps1))
    branch = -1 if eps1 < 0 else 1
    if eps1 == 0:
        return WorkingPoint(params, Regime.AT, 0.0, kappa / (2.0 * lambda_c), 0.0, 0.5 * kappa, 1)
    return WorkingPoint(
        params, Regime.ABOVE, eps1 / lambda_c, kappa / (2.0 * lambda_c), float(eps1), 0.5 * kappa, branch
    )


def down_conversion_fraction(wp: WorkingPoint) -> float:
    """Share of the drive converted into the fundamental, ``lambda alpha**2 / (2 eps)``.

    Above threshold this equals ``eps1**2 / (eps1**2 + kappa**2 / 2)``.
    """
    eps = wp.params.epsilon_d
    if eps <= 0:
        raise InvalidParams("down-conversion fraction is undefined at zero drive")
    return wp.params.lambda_c * wp.alpha**2 / (2.0 * eps)
