"""Exception hierarchy shared by the library and the command line."""


class PinchClustError(Exception):
    """Base class for all library errors."""


class InputError(PinchClustError, ValueError):
    """Malformed or unreadable input data (files, identifiers)."""


class DomainError(PinchClustError, ValueError):
    """Arguments violate an operation's preconditions."""


class CapacityError(DomainError):
    """Problem too large for an exhaustive routine."""


class DegenerateFoldError(DomainError):
    """A scoring fold holds a single class, so no ROC can be computed."""


class EvaluationError(DomainError):
    """Every fold of a cross-validation run was degenerate."""
