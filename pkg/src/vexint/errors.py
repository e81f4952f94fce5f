"""Exception and warning types shared across the package."""

__all__ = [
    "VexintError",
    "InvalidConfiguration",
    "InvalidExponent",
    "InvalidInput",
    "InvalidSelection",
    "ResolutionExceeded",
    "ConjugateUndefined",
    "SolverFailure",
    "AdmissibilityFailure",
    "UnsupportedParameters",
    "PreconditionViolation",
    "PreconditionWarning",
]


class VexintError(Exception):
    """Base class for all package errors."""


class InvalidConfiguration(VexintError):
    """Grid or run configuration violates a structural constraint."""


class InvalidExponent(VexintError):
    """Exponent field outside its admissible range or malformed."""


class InvalidInput(VexintError):
    """Operation input violates a stated precondition."""


class InvalidSelection(VexintError):
    """Per-cube subset selection fails coverage or measure conditions."""


class ResolutionExceeded(VexintError):
    """Requested dyadic level is finer than the grid supports."""


class ConjugateUndefined(VexintError):
    """Conjugate exponent requested for a field touching 1."""


class SolverFailure(VexintError):
    """Iterative solver exhausted its iteration budget."""


class AdmissibilityFailure(VexintError):
    """Filter-bank admissibility or energy bound violated."""


class UnsupportedParameters(VexintError):
    """Parameter combination outside the supported theorem cases."""


class PreconditionViolation(VexintError):
    """A hard hypothesis of the verified statement does not hold."""


class PreconditionWarning(UserWarning):
    """A soft precondition failed; the operation ran anyway and is flagged."""
