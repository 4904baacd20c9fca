"""Exception hierarchy.  The CLI maps these onto exit codes."""


class GSTError(Exception):
    """Base class for errors raised by this package."""


class InvalidInput(GSTError, ValueError):
    """Malformed or out-of-range input (CLI exit code 2)."""


class EnumerationCapExceeded(InvalidInput):
    pass


class ZeroProbabilityCondition(GSTError):
    """Conditioning on an event of probability zero."""


class NumericalFailure(GSTError):
    """Internal numerical failure (CLI exit code 3)."""


class EigenConvergenceError(NumericalFailure):
    pass


class InertiaDisagreement(NumericalFailure):
    """The exact LDL route and the float eigensolver disagree."""


class PivotBreakdown(NumericalFailure):
    """A leading principal minor vanished during an exact LDL^T run."""
