"""Moment-equation ground truth for the linearized fluctuations.

The fluctuation vector is ``x = (A, A+, B, B+)`` with ``a = alpha + A`` and
``b = beta + B``.  Its dynamics are linear, ``dx/dt = M x + F(t)``, with
vacuum Langevin forces whose only non-vanishing correlations are
``<F_a(t) F_a+(t')> = <F_b(t) F_b+(t')> = kappa delta(t - t')``.

Moments are kept in written operator order, ``N[i, j] = <x_i x_j>``.  With
that convention the first and second moments obey

    dm/dt = M m,        dN/dt = M N + N M^T + D,

where ``D`` is *not* symmetric: ``D[A, A+] = kappa`` but ``D[A+, A] = 0``.
The commutators ``[A, A+] = [B, B+] = 1`` then appear as the antisymmetric
part of ``N`` and are conserved exactly by the linear flow.

Nothing in this module uses the closed-form expressions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .closedform import Observables
from .errors import SingularSolve, StepTooLarge, Unstable
from .model import WorkingPoint

A, AD, B, BD = 0, 1, 2, 3
LABELS = ("A", "A+", "B", "B+")

DEFAULT_DT = 0.005  # in units of 1/kappa
MAX_DT = 0.01  # in units of 1/kappa
STABILITY_GUARD = 1e-9


@dataclass(frozen=True)
class MomentState:
    """First moments ``m`` and ordered second moments ``N`` at time ``t``."""

    t: float
    m: np.ndarray
    N: np.ndarray

    def covariance(self) -> np.ndarray:
        """Ordered moments of the centred fluctuations, ``N - m m^T``."""
        return self.N - np.outer(self.m, self.m)

    def commutator_defects(self) -> tuple[float, float]:
        """Deviation of ``[A, A+]`` and ``[B, B+]`` from 1."""
        N = self.N
        return N[A, AD] - N[AD, A] - 1.0, N[B, BD] - N[BD, B] - 1.0

    def cross_mode_asymmetry(self) -> float:
        """Largest violation of ``[x_i, y_j] = 0`` between the two modes."""
        block = self.N[:2, 2:]
        return float(np.max(np.abs(block - self.N[2:, :2].T)))


def build_drift(wp: WorkingPoint) -> np.ndarray:
    k2, e1, e2 = 0.5 * wp.kappa, wp.eps1, wp.eps2
    return np.array(
        [
            [-k2, e2, e1, 0.0],
            [e2, -k2, 0.0, e1],
            [-e1, 0.0, -k2, 0.0],
            [0.0, -e1, 0.0, -k2],
        ]
    )


def build_diffusion(wp: WorkingPoint) -> np.ndarray:
    D = np.zeros((4, 4))
    D[A, AD] = wp.kappa
    D[B, BD] = wp.kappa
    return D


def stability_spectrum(M: np.ndarray) -> np.ndarray:
    """Eigenvalues of the drift, sorted by real part, largest first."""
    eig = np.linalg.eigvals(M)
    return eig[np.argsort(-eig.real, kind="stable")]


def is_stable(M: np.ndarray, scale: float, guard: float = STABILITY_GUARD) -> bool:
    return bool(stability_spectrum(M)[0].real < -guard * scale)


def vacuum_state(wp: WorkingPoint) -> MomentState:
    """Both cavity modes in vacuum: ``<a> = <b> = 0`` so ``<A> = -alpha``, ``<B> = -beta``."""
    m = np.array([-wp.alpha, -wp.alpha, -wp.beta, -wp.beta])
    N = np.outer(m, m)
    N[A, AD] += 1.0
    N[B, BD] += 1.0
    return MomentState(0.0, m, N)


def lyapunov_operator(M: np.ndarray) -> np.ndarray:
    """Matrix of ``N -> M N + N M^T`` acting on row-major ``vec(N)``."""
    eye = np.eye(M.shape[0])
    return np.kron(M, eye) + np.kron(eye, M)


def steady_moments(wp: WorkingPoint, guard: float = STABILITY_GUARD) -> MomentState:
    """Stationary solution of ``M N + N M^T + D = 0``.

    Solved as a dense 16x16 system with LU (partial pivoting).  Marginal
    spectra (threshold, or the undamped direction below it) raise
    :class:`SingularSolve`; growing modes raise :class:`Unstable`.
    """
    M = build_drift(wp)
    lead = stability_spectrum(M)[0].real
    if lead > guard * wp.kappa:
        raise Unstable(f"drift eigenvalue with real part {lead:.3e} > 0")
    if lead >= -guard * wp.kappa:
        raise SingularSolve(f"marginal drift eigenvalue (real part {lead:.3e})")
    D = build_diffusion(wp)
    N = np.linalg.solve(lyapunov_operator(M), -D.reshape(-1)).reshape(4, 4)
    return MomentState(math.inf, np.zeros(4), N)


def lyapunov_residual(wp: WorkingPoint, N: np.ndarray) -> float:
    M = build_drift(wp)
    return float(np.max(np.abs(M @ N + N @ M.T + build_diffusion(wp))))


def _step_count(wp: WorkingPoint, t_final: float, dt: float | None) -> tuple[int, float]:
    if t_final < 0:
        raise ValueError(f"t_final must be >= 0, got {t_final}")
    if dt is None:
        dt = DEFAULT_DT / wp.kappa
    if dt <= 0:
        raise StepTooLarge(f"dt must be positive, got {dt}")
    if dt > MAX_DT / wp.kappa * (1 + 1e-12):
        raise StepTooLarge(f"dt = {dt} exceeds {MAX_DT}/kappa = {MAX_DT / wp.kappa}")
    n = math.ceil(t_final / dt - 1e-9) if t_final > 0 else 0
    return n, (t_final / n if n else 0.0)


def _rk4(f, y, h):
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def iter_moments(
    wp: WorkingPoint, init: MomentState, t_final: float, dt: float | None = None
) -> Iterator[MomentState]:
    """Yield the moment state after every fixed RK4 step, starting with ``init``.

    The step is shrunk to ``t_final / ceil(t_final / dt)`` so the last state
    lands on ``t_final`` exactly.
    """
    n, h = _step_count(wp, t_final, dt)
    M = build_drift(wp)
    D = build_diffusion(wp)
    m, N = np.array(init.m, dtype=float), np.array(init.N, dtype=float)
    t0 = 0.0 if not math.isfinite(init.t) else init.t
    yield MomentState(t0, m.copy(), N.copy())
    for i in range(1, n + 1):
        m = _rk4(lambda v: M @ v, m, h)
        N = _rk4(lambda X: M @ X + X @ M.T + D, N, h)
        yield MomentState(t0 + i * h, m.copy(), N.copy())


def integrate_moments(
    wp: WorkingPoint, init: MomentState, t_final: float, dt: float | None = None
) -> MomentState:
    state = init
    for state in iter_moments(wp, init, t_final, dt):
        pass
    return state


def fundamental_matrix(wp: WorkingPoint, t: float, dt: float | None = None) -> np.ndarray:
    """Propagator of the homogeneous system, integrated from the identity."""
    n, h = _step_count(wp, t, dt)
    M = build_drift(wp)
    phi = np.eye(4)
    for _ in range(n):
        phi = _rk4(lambda X: M @ X, phi, h)
    return phi


def observables_from_moments(wp: WorkingPoint, ms: MomentState) -> Observables:
    """Observables of the full fields ``a = alpha + A``, ``b = beta + B``.

    Variances use the centred moments; photon numbers add the coherent
    amplitude back.  At steady state ``m = 0`` and the centred and raw
    moments coincide.
    """
    C = ms.covariance()
    duan = 2 + 2 * C[AD, A] + 2 * C[BD, B] - 2 * C[A, B] - 2 * C[AD, BD]
    common = 1 + C[AD, A] + C[BD, B] + C[AD, B] + C[A, BD]
    pair = C[A, B] + C[AD, BD] + 0.5 * (C[A, A] + C[AD, AD] + C[B, B] + C[BD, BD])

    # full moments <a+a>, <b+b>, <a+b> with a real mean-field offset
    mean_a = wp.alpha + ms.m[A]
    mean_b = wp.beta + ms.m[B]
    full = ms.N
    ada = wp.alpha**2 + wp.alpha * (ms.m[AD] + ms.m[A]) + full[AD, A]
    bdb = wp.beta**2 + wp.beta * (ms.m[BD] + ms.m[B]) + full[BD, B]
    adb = wp.alpha * wp.beta + wp.alpha * ms.m[B] + wp.beta * ms.m[AD] + full[AD, B]
    bda = wp.alpha * wp.beta + wp.beta * ms.m[A] + wp.alpha * ms.m[BD] + full[BD, A]
    return Observables(
        duan_sum=float(duan),
        var_plus=float(common + pair),
        var_minus=float(common - pair),
        mean_photon=float(0.5 * (ada + bdb + adb + bda)),
        intensity_diff=float(ada - bdb),
        mean_a=float(mean_a),
        mean_b=float(mean_b),
    )
