"""Exception hierarchy shared by every layer of the package."""


class DPOError(Exception):
    """Base class for all package errors."""


class InvalidParams(DPOError, ValueError):
    """Physical parameters or configuration outside their admissible range."""


class SingularRegime(DPOError):
    """A closed-form denominator falls inside its guard band."""


class FormMismatch(DPOError, ValueError):
    """A reduced (above-threshold) expression was requested off its domain."""


class Unstable(DPOError):
    """The linearized drift has an eigenvalue with non-negative real part."""


class SingularSolve(DPOError):
    """The steady-state moment system is (numerically) singular."""


class StepTooLarge(DPOError, ValueError):
    """Integrator step exceeds the allowed fraction of the cavity lifetime."""


class AllPointsSingular(DPOError):
    """Every grid point of a sweep was skipped."""


class BracketSingular(DPOError):
    """A search bracket contains no evaluable point."""


class NoCrossing(DPOError):
    """No sign change of the target function inside the search bracket."""
