"""Exception hierarchy for designlab.

Every error raised on bad input derives from both DesignLabError and
ValueError, so callers can catch either.
"""


class DesignLabError(Exception):
    """Base class for all designlab errors."""


class DimensionMismatchError(DesignLabError, ValueError):
    """Two vectors (or a vector and a configuration) have different dimensions."""


class FieldConformanceError(DesignLabError, ValueError):
    """A vector has nonzero components outside its field (e.g. a j-part in C^d)."""


class ConfigurationError(DesignLabError, ValueError):
    """A configuration or configuration document violates its invariants."""


class EnvelopeError(DesignLabError, ValueError):
    """A polynomial computation falls outside the supported size envelope."""


class DegreeMismatchError(DesignLabError, ValueError):
    """Polynomials do not have the degree an operation requires."""


class DomainError(DesignLabError, ValueError):
    """An argument lies outside the domain of a function."""


class NotUnitNormError(DesignLabError, ValueError):
    """An operation that requires unit vectors received a non-unit vector."""


class UnsupportedDimensionError(DesignLabError, ValueError):
    """A construction is only defined for particular dimensions."""
