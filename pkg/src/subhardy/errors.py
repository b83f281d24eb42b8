"""Exception and warning types shared across the toolkit."""

__all__ = [
    'ToolkitError', 'ArgumentError', 'SpaceMismatchError', 'CapError',
    'NormalizationError', 'DomainError', 'WindowError', 'InvarianceError',
    'CertificationError', 'BoundViolationError', 'ParseError', 'CapWarning',
]


class ToolkitError(Exception):
    """Base class for all errors raised by this package."""


class ArgumentError(ToolkitError):
    """An argument is structurally invalid (wrong shape, range, or type)."""


class SpaceMismatchError(ToolkitError):
    """Two coefficient vectors belong to different truncated spaces."""


class CapError(ToolkitError):
    """A truncation cap is too small for the requested object."""


class NormalizationError(ToolkitError):
    """Basis generation requires the first Blaschke zero at the origin."""


class DomainError(ToolkitError):
    """Evaluation point lies materially outside the closed unit disc."""


class WindowError(ToolkitError):
    """An exact window is empty or too small to carry the computation."""


class InvarianceError(ToolkitError):
    """A subspace is not invariant under the requested operator."""


class CertificationError(ToolkitError):
    """A required operator certificate (precondition) did not pass."""


class BoundViolationError(ToolkitError):
    """The generator count exceeded the product-of-degrees bound.

    This is a falsification event and is never clipped away silently.
    """


class ParseError(ToolkitError):
    """A JSON payload is malformed; the message names the offending field."""


class CapWarning(UserWarning):
    """A cap is below the recommended tail-bound policy (result still exact
    through the stored coefficients, but downstream tail estimates may be
    loose)."""
