"""Linearized driven degenerate parametric oscillator.

Closed-form steady-state observables (Duan sum, two-mode quadrature
variances, photon number, intensity difference), an independent
moment-equation oracle, and sweep/validation tooling around both.
"""

from .closedform import Form, Observables, squeezing_percent
from .errors import (
    AllPointsSingular,
    BracketSingular,
    DPOError,
    FormMismatch,
    InvalidParams,
    NoCrossing,
    SingularRegime,
    SingularSolve,
    StepTooLarge,
    Unstable,
)
from .model import (
    Regime,
    SystemParams,
    WorkingPoint,
    classify_regime,
    down_conversion_fraction,
    solve_steady_state,
    threshold_drive,
    working_point_from_eps1,
)

__version__ = "0.1.0"

__all__ = [
    "AllPointsSingular",
    "BracketSingular",
    "DPOError",
    "Form",
    "FormMismatch",
    "InvalidParams",
    "NoCrossing",
    "Observables",
    "Regime",
    "SingularRegime",
    "SingularSolve",
    "StepTooLarge",
    "SystemParams",
    "Unstable",
    "WorkingPoint",
    "classify_regime",
    "down_conversion_fraction",
    "solve_steady_state",
    "squeezing_percent",
    "threshold_drive",
    "working_point_from_eps1",
]
