"""Exception taxonomy shared across the package.

Validation errors mean the caller handed us something malformed (exit code 1
in the CLI); domain errors mean the inputs are well-formed but outside the
mathematical domain of the requested quantity (exit code 2).
"""


class ValidationError(ValueError):
    """Malformed input: bad vectors, bad files, bad configuration."""


class DomainError(ValueError):
    """Input outside the mathematical domain (e.g. radius past the spherical diameter)."""


class UnsupportedRegimeError(DomainError):
    """A quantity was requested in a curvature regime where it is undefined (e.g. K > 0 degree bounds)."""
