"""Analytic expressions for the linearized oscillator.

Every observable comes in two independently written variants:

``Form.GENERAL``
    expressed through ``eps1``, ``eps2`` and the mixing coefficients ``p``
    and ``q``; valid in any stable regime.
``Form.REDUCED``
    the above-threshold simplification with ``eps2 = kappa / 2`` substituted;
    a function of ``eps1``, ``kappa`` (and ``lambda_c`` for photon numbers).

Neither variant is derived from the other in code.  Where they disagree the
validation harness reports it; nothing here tries to reconcile them.

All square roots of ``eps2**2 - 4 eps1**2`` use the principal complex branch,
so the hyperbolic expressions continue into the oscillatory regime
(``4 eps1**2 > eps2**2``) without case analysis.  Results are checked to be
real before the imaginary part is dropped.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import FormMismatch, SingularRegime, Unstable
from .model import Regime, WorkingPoint

DEFAULT_GUARD = 1e-9
IMAG_RTOL = 1e-12


class Form(str, enum.Enum):
    GENERAL = "general"
    REDUCED = "reduced"


@dataclass(frozen=True)
class PQCoeffs:
    p: complex
    q: complex
    root: complex  # principal sqrt(eps2**2 - 4 eps1**2)


@dataclass(frozen=True)
class TransientCoeffs:
    """Time-dependent amplitudes of the explicit fluctuation solution.

    ``a4`` and ``a6`` carry ``sinh`` of the complex root and are purely
    imaginary in the oscillatory regime; only their products with ``p`` and
    ``q`` are physical.  Use :meth:`propagator` for the real solution map.
    """

    t: float
    a1: float
    a2: float
    a3: float
    a4: complex
    a5: float
    a6: complex
    pq: PQCoeffs

    def propagator(self) -> np.ndarray:
        """Real 4x4 map of ``(A, A+, B, B+)`` at time 0 onto time ``t``."""
        p, q = self.pq.p, self.pq.q
        a3, a4, a5, a6 = self.a3, self.a4, self.a5, self.a6
        # the A+ and B+ rows are the swap images of the A and B rows
        rows = [
            [a3 + p * a4, a5 + p * a6, q * a6, q * a4],
            [a5 + p * a6, a3 + p * a4, q * a4, q * a6],
            [-q * a6, -q * a4, a3 - p * a4, a5 - p * a6],
            [-q * a4, -q * a6, a5 - p * a6, a3 - p * a4],
        ]
        return np.array([[_real(z, "propagator entry") for z in row] for row in rows])


@dataclass(frozen=True)
class NoiseMoments:
    """Steady-state noise correlations ``<f+f>``, ``<g+g>``, ``<fg>`` and ``<a+b>``."""

    ff: float
    gg: float
    fg: float
    ab_cross: float


@dataclass(frozen=True)
class Observables:
    duan_sum: float
    var_plus: float
    var_minus: float
    mean_photon: float
    intensity_diff: float
    mean_a: float
    mean_b: float

    @property
    def entangled(self) -> bool:
        return self.duan_sum < 2.0

    def as_dict(self) -> dict:
        return {
            "duan_sum": self.duan_sum,
            "var_plus": self.var_plus,
            "var_minus": self.var_minus,
            "mean_photon": self.mean_photon,
            "intensity_diff": self.intensity_diff,
            "mean_a": self.mean_a,
            "mean_b": self.mean_b,
            "entangled": self.entangled,
        }


def _real(z: complex, what: str) -> float:
    z = complex(z)
    if abs(z.imag) > IMAG_RTOL * (1.0 + abs(z.real)):
        raise ArithmeticError(f"{what} has imaginary residue {z.imag:.3e}")
    return z.real


def _nonzero(value: float, scale: float, guard: float, what: str) -> float:
    if abs(value) <= guard * scale:
        raise SingularRegime(f"{what} = {value:.3e} lies inside the guard band ({guard:g} x {scale:.3e})")
    return value


def _form(form) -> Form:
    return Form(form) if not isinstance(form, Form) else form


def _require_reduced(wp: WorkingPoint) -> None:
    if wp.regime is not Regime.ABOVE:
        raise FormMismatch(f"reduced expressions need an above-threshold working point, got {wp.regime.value}")


def pq(wp: WorkingPoint, guard: float = DEFAULT_GUARD) -> PQCoeffs:
    """Mixing coefficients ``p = eps2 / root`` and ``q = 2 eps1 / root``.

    At ``eps1 = 0`` the coefficients are ``(1, 0)`` for every ``eps2 >= 0``;
    this includes the undriven cavity, where it is the continuous limit.
    Otherwise ``p**2 - q**2 = 1``.
    """
    e1, e2, kappa = wp.eps1, wp.eps2, wp.kappa
    if e1 == 0:
        return PQCoeffs(1.0 + 0j, 0j, complex(e2))
    radicand = e2 * e2 - 4.0 * e1 * e1
    _nonzero(radicand, kappa * kappa, guard, "eps2**2 - 4 eps1**2")
    root = cmath.sqrt(radicand)
    return PQCoeffs(e2 / root, 2.0 * e1 / root, root)


def transient_coeffs(wp: WorkingPoint, t: float, guard: float = DEFAULT_GUARD) -> TransientCoeffs:
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    c = pq(wp, guard)
    e1, e2, kappa, lam = wp.eps1, wp.eps2, wp.kappa, wp.lambda_c
    p, q = c.p, c.q
    ch = cmath.cosh(0.5 * c.root * t)
    sh = cmath.sinh(0.5 * c.root * t)
    decay = math.exp(-0.5 * kappa * t)
    shifted = math.exp(-0.5 * (kappa - e2) * t)
    a1 = -(shifted / lam) * (e1 * ch + (e1 * p + e2 * q) * sh)
    a2 = -(shifted / lam) * ((e1 * q + e2 * p) * sh - e2 * ch)
    half = 0.5 * e2 * t
    return TransientCoeffs(
        t=t,
        a1=_real(a1, "a1"),
        a2=_real(a2, "a2"),
        a3=_real(decay * math.cosh(half) * ch, "a3"),
        a4=decay * math.sinh(half) * sh,
        a5=_real(decay * math.sinh(half) * ch, "a5"),
        a6=decay * math.cosh(half) * sh,
        pq=c,
    )


def fluctuation_propagator(wp: WorkingPoint, t: float, guard: float = DEFAULT_GUARD) -> np.ndarray:
    return transient_coeffs(wp, t, guard).propagator()


def mean_fields(wp: WorkingPoint, t: float, guard: float = DEFAULT_GUARD) -> tuple[float, float]:
    """Mean amplitudes ``(<a(t)>, <b(t)>)`` from the explicit transient solution."""
    tc = transient_coeffs(wp, t, guard)
    return wp.alpha + tc.a1, wp.beta + tc.a2


def _denominators(wp: WorkingPoint, guard: float) -> tuple[float, float, float, float]:
    e1, e2, k = wp.eps1, wp.eps2, wp.kappa
    k2 = k * k
    d1 = _nonzero(k * (k - 2 * e2) + 4 * e1 * e1, k2, guard, "kappa(kappa - 2 eps2) + 4 eps1**2")
    d2 = _nonzero(k * (k + 2 * e2) + 4 * e1 * e1, k2, guard, "kappa(kappa + 2 eps2) + 4 eps1**2")
    d3 = _nonzero(k2 - e2 * e2, k2, guard, "kappa**2 - eps2**2")
    d4 = _nonzero(k2 - (e2 * e2 - 4 * e1 * e1), k2, guard, "kappa**2 - (eps2**2 - 4 eps1**2)")
    return d1, d2, d3, d4


def _check_stable(wp: WorkingPoint, c: PQCoeffs, guard: float) -> None:
    # slowest drift eigenvalue is -kappa/2 + eps2/2 + Re(root)/2
    slowest = -0.5 * wp.kappa + 0.5 * abs(wp.eps2) + 0.5 * abs(c.root.real)
    if slowest >= -guard * wp.kappa:
        raise Unstable(f"slowest fluctuation decay rate {slowest:.3e} is not negative")


def steady_noise_moments(wp: WorkingPoint, guard: float = DEFAULT_GUARD) -> NoiseMoments:
    c = pq(wp, guard)
    d1, d2, d3, d4 = _denominators(wp, guard)
    _check_stable(wp, c, guard)
    k, e1, e2 = wp.kappa, wp.eps1, wp.eps2
    p, q, root = c.p, c.q, c.root
    s = 1 + p * p + q * q
    tail = k * k * (1 - p * p - q * q) / (4 * d3) - k * k * (1 - p * p + q * q) / (4 * d4) - (1 + p * p - q * q) / 4
    ff = k * (s * (k - e2) - 2 * p * root) / (8 * d1) + k * (s * (k + e2) + 2 * p * root) / (8 * d2) + tail
    gg = k * (s * (k - e2) + 2 * p * root) / (8 * d1) + k * (s * (k + e2) - 2 * p * root) / (8 * d2) + tail
    fg = (
        -k * p * q * (k - e2) / (4 * d1)
        - k * q * p * (k + e2) / (4 * d2)
        + q * p * k * k / (2 * d3)
        - k * k * p * q / (2 * d4)
        + p * q / 2
    )
    return NoiseMoments(
        ff=_real(ff, "<f+f>"),
        gg=_real(gg, "<g+g>"),
        fg=_real(fg, "<fg>"),
        ab_cross=_cross_correlation(wp, d1, d2, d3, guard),
    )


def _cross_correlation(wp: WorkingPoint, d1: float, d2: float, d3: float, guard: float) -> float:
    k, e1, e2 = wp.kappa, wp.eps1, wp.eps2
    if e1 == 0:
        return 0.0
    radicand = _nonzero(e2 * e2 - 4 * e1 * e1, k * k, guard, "eps2**2 - 4 eps1**2")
    return -k * e1 * e2 / (4 * radicand) * ((k - e2) / d1 - (k + e2) / d2 + 2 * e2 / d3)


def duan_sum(wp: WorkingPoint, form=Form.GENERAL, guard: float = DEFAULT_GUARD) -> float:
    """Sum of the variances of ``X_a - X_b`` and ``P_a + P_b``.

    Values below 2 certify entanglement between the two modes.
    """
    if _form(form) is Form.REDUCED:
        return _duan_reduced(wp, guard)
    c = pq(wp, guard)
    d1, d2, d3, d4 = _denominators(wp, guard)
    _check_stable(wp, c, guard)
    k, e2 = wp.kappa, wp.eps2
    p, q = c.p, c.q
    s = 1 + p * p + q * q + 2 * q * p
    value = (
        2
        + k * s * (k - e2) / (2 * d1)
        + k * s * (k + e2) / (2 * d2)
        + k * k * (1 - p * p - q * q - 2 * q * p) / d3
        - k * k * (1 - p * p + q * q - 2 * q * p) / d4
        - (1 + p * p - q * q + 2 * q * p)
    )
    return _real(value, "duan sum")


def _duan_reduced(wp: WorkingPoint, guard: float) -> float:
    _require_reduced(wp)
    k, e1 = wp.kappa, wp.eps1
    k2, k3 = k * k, k**3
    _nonzero(4 * e1 * e1, k2, guard, "4 eps1**2")
    m = _nonzero(k2 - 16 * e1 * e1, k2, guard, "kappa**2 - 16 eps1**2")
    return (
        k3 * (k + 4 * e1) / (8 * e1 * e1 * m)
        + 3 * k3 * (k + 4 * e1) / (4 * m * (k2 + 2 * e1 * e1))
        - (16 * e1 * (4 * e1 + k) + 24 * k * e1) / (3 * m)
        + 16 * k3 * e1 / (m * (3 * k2 + 16 * e1 * e1))
    )


def quadrature_variances(wp: WorkingPoint, form=Form.GENERAL, guard: float = DEFAULT_GUARD) -> tuple[float, float]:
    """Variances ``(plus, minus)`` of the quadratures of ``c = (a + b)/sqrt(2)``.

    The vacuum level is 1; a value below 1 means two-mode squeezing.
    """
    k, e1, e2 = wp.kappa, wp.eps1, wp.eps2
    k2 = k * k
    out = []
    if _form(form) is Form.REDUCED:
        _require_reduced(wp)
        for s in (1, -1):
            den = _nonzero(k2 * (1 - s) + 4 * e1 * e1, k2, guard, "kappa**2 (1 -/+ 1) + 4 eps1**2")
            out.append((k2 * (5 - 4 * s) + 4 * e1 * (4 * e1 + s * k)) / (2 * (2 - s) * den))
        return out[0], out[1]
    for s in (1, -1):
        lin = _nonzero(k - s * e2, k, guard, "kappa -/+ eps2")
        quad = _nonzero(k * (k - 2 * s * e2) + 4 * e1 * e1, k2, guard, "kappa(kappa -/+ 2 eps2) + 4 eps1**2")
        num = k2 * (k - 2 * s * e2) + k * e2 * e2 + 4 * k * e1 * e1 + 2 * s * k * e2 * e1
        out.append(num / (lin * quad))
    return out[0], out[1]


def coherent_photon_number(wp: WorkingPoint, form=Form.GENERAL) -> float:
    """Mean-field contribution to the superposed-mode photon number.

    The general variant is ``(alpha + beta)**2 / 2``; the reduced variant is
    the leading term of the above-threshold simplification.  They differ
    (see the validation report); both are returned as written.
    """
    if _form(form) is Form.REDUCED:
        _require_reduced(wp)
        k, e1, lam = wp.kappa, wp.eps1, wp.lambda_c
        return ((2 * e1 - k) ** 2 - 4 * lam * lam) / (8 * lam * lam)
    return 0.5 * (wp.alpha + wp.beta) ** 2


def mean_photon_number(wp: WorkingPoint, form=Form.GENERAL, guard: float = DEFAULT_GUARD) -> float:
    """Mean photon number of the superposed mode ``c = (a + b)/sqrt(2)``."""
    k, e1 = wp.kappa, wp.eps1
    if _form(form) is Form.REDUCED:
        _require_reduced(wp)
        k2, k3 = k * k, k**3
        _nonzero(4 * e1 * e1, k2, guard, "4 eps1**2")
        m = _nonzero(k2 - 16 * e1 * e1, k2, guard, "kappa**2 - 16 eps1**2")
        return (
            coherent_photon_number(wp, Form.REDUCED)
            + k3 * (k - 2 * e1) / (32 * e1 * e1 * m)
            + 3 * k3 * (k + 2 * e1) / (16 * m * (k2 + 2 * e1 * e1))
            - 2 * e1 * (k + 16 * e1) / (3 * m)
        )
    c = pq(wp, guard)
    d1, d2, d3, d4 = _denominators(wp, guard)
    _check_stable(wp, c, guard)
    e2 = wp.eps2
    p, q = c.p, c.q
    value = (
        coherent_photon_number(wp, Form.GENERAL)
        + k * (k - e2) * (1 + p * p + q * q) / (8 * d1)
        + k * (k + e2) * (1 + p * p + q * q) / (8 * d2)
        + k * k * (1 - p * p - q * q) / (4 * d3)
        - k * k * (1 - p * p + q * q) / (4 * d4)
        - (1 + p * p - q * q) / 4
        + _cross_correlation(wp, d1, d2, d3, guard)
    )
    return _real(value, "mean photon number")


def intensity_difference(wp: WorkingPoint, form=Form.GENERAL, guard: float = DEFAULT_GUARD) -> float:
    """Mean of ``a+a - b+b``."""
    k, e1, lam = wp.kappa, wp.eps1, wp.lambda_c
    if _form(form) is Form.REDUCED:
        _require_reduced(wp)
        _nonzero(4 * e1 * e1, k * k, guard, "4 eps1**2")
        return (4 * e1 * e1 - k * k) / (4 * lam * lam) - k * k / (16 * e1 * e1) + k * k / (8 * (k * k + 2 * e1 * e1))
    c = pq(wp, guard)
    e2 = wp.eps2
    d1 = _nonzero(k * (k - 2 * e2) + 4 * e1 * e1, k * k, guard, "kappa(kappa - 2 eps2) + 4 eps1**2")
    d2 = _nonzero(k * (k + 2 * e2) + 4 * e1 * e1, k * k, guard, "kappa(kappa + 2 eps2) + 4 eps1**2")
    _check_stable(wp, c, guard)
    pr = c.p * c.root
    value = wp.alpha**2 - wp.beta**2 - k * pr / (2 * d1) + k * pr / (2 * d2)
    return _real(value, "intensity difference")


def classical_intensity_difference(wp: WorkingPoint) -> float:
    return wp.alpha**2 - wp.beta**2


def squeezing_percent(var: float) -> float:
    """Noise reduction below the vacuum level, in percent (negative if anti-squeezed)."""
    return (1.0 - var) * 100.0


def observables(wp: WorkingPoint, form=Form.GENERAL, guard: float = DEFAULT_GUARD) -> Observables:
    vp, vm = quadrature_variances(wp, form, guard)
    return Observables(
        duan_sum=duan_sum(wp, form, guard),
        var_plus=vp,
        var_minus=vm,
        mean_photon=mean_photon_number(wp, form, guard),
        intensity_diff=intensity_difference(wp, form, guard),
        mean_a=wp.alpha,
        mean_b=wp.beta,
    )
