"""Exception types shared across the package."""


class DomainError(ValueError):
    """A symbol, word or parameter lies outside its declared domain."""


class PreconditionError(ValueError):
    """A documented operation precondition is violated (e.g. a scaling
    potential that is not strictly positive where positivity is required)."""


class ModeError(ValueError):
    """An evaluation mode was requested that the data cannot support,
    e.g. an exact orbit sum whose trailing coordinates are not pinned."""


class SignFlagError(RuntimeError):
    """A potential violated one of its declared sign flags at evaluation
    time.  This is a hard error: the flags are preconditions downstream."""


class ConvergenceError(RuntimeError):
    """An iterative solve hit its iteration cap.  ``bracket`` carries the
    last certified enclosure."""

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class ResourceError(RuntimeError):
    """A computation exceeded its configured state-space or memory budget.
    ``size`` names the offending reachable-set size."""

    def __init__(self, message, size=None):
        super().__init__(message)
        self.size = size
