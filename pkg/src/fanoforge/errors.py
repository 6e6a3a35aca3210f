"""Exception types shared across the package."""


class FanoForgeError(Exception):
    """Base class for all package errors."""


class ValidationError(FanoForgeError):
    """Input violates a documented precondition."""


class ResourceCapError(FanoForgeError):
    """A configurable resource cap was exceeded.

    Carries enough context to resume or retry with a larger cap.
    """

    def __init__(self, message, context=None):
        super().__init__(message)
        self.context = context or {}


class UnboundedRegionError(FanoForgeError):
    """A halfspace system describes an unbounded region."""


class DimensionCapError(FanoForgeError):
    """Requested computation exceeds the supported dimension."""
