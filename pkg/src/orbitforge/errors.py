"""Exception hierarchy shared by all modules."""


class OrbitforgeError(Exception):
    """Base class; carries a stable machine-readable code for the CLI."""

    code = "error"


class DomainError(OrbitforgeError):
    """Input violates a documented precondition."""

    code = "domain"


class ResourceError(OrbitforgeError):
    """A configured cap (degree, iterations, level) would be exceeded."""

    code = "resource"


class UndecidedError(OrbitforgeError):
    """The computation ran out of budget without reaching a certified verdict."""

    code = "undecided"


class PrecisionError(OrbitforgeError):
    """Tracked precision is insufficient to decide a comparison exactly."""

    code = "precision"


class WindowError(PrecisionError):
    """A series window is not certified for the requested radius or cutoff.

    The message carries a hint about the minimal window/order that would do.
    """

    code = "window"
