"""Exception hierarchy.

Each class maps to one exit-code class of the command line tool.
"""


class IcisError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ParseError(IcisError, ValueError):
    """Malformed polynomial text; ``position`` is the 0-based offset."""

    exit_code = 2

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class RingMismatchError(IcisError, ValueError):
    exit_code = 2


class ValidationError(IcisError, ValueError):
    """Input germ fails a required invariant (not ICIS, not finite, ...)."""

    exit_code = 2


class ResourceError(IcisError, RuntimeError):
    """A configured degree, size or time limit was exceeded."""

    exit_code = 3


class IdentityFailure(IcisError):
    exit_code = 4


class InconsistencyError(IcisError, RuntimeError):
    """Internal cross-check failed (e.g. inexact division that must be exact)."""

    exit_code = 5


class ContainmentError(InconsistencyError):
    """Submodule containment required by a construction does not hold."""
