"""Exception types raised across the library."""


class ArgyrisError(Exception):
    """Base class for all library errors."""


class DomainError(ArgyrisError):
    """A parametric coordinate lies outside [0, 1]."""


class InvalidConfigError(ArgyrisError):
    """A space configuration violates a structural requirement."""


class NotInSpaceError(ArgyrisError):
    """A function handed to an exact-representation routine is not in the space."""


class TopologyError(ArgyrisError):
    """Inconsistent patch/edge/vertex connectivity."""


class ConformityError(ArgyrisError):
    """Adjacent patches do not match along a shared edge."""


class GeometryFormatError(ArgyrisError):
    """A geometry file is malformed."""


class NotASG1Error(ArgyrisError):
    """An interface does not admit linear gluing data within tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegenerateGluingError(ArgyrisError):
    """The beta-split system is singular (alpha factors share a root)."""


class NumericalError(ArgyrisError):
    """A linear solve or factorization failed."""
