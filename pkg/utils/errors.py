from __future__ import annotations


class VortexForgeError(Exception):
    """Base class for every error raised by the solver library."""


class InvalidArgumentError(VortexForgeError, ValueError):
    pass


class DimensionError(VortexForgeError, ValueError):
    """Array length does not match the grid it is evaluated on."""


class PreconditionError(VortexForgeError, ValueError):
    """An operation's documented precondition does not hold (e.g. the flux window)."""


class ConfigError(VortexForgeError, ValueError):
    pass


class DegenerateProjectionError(VortexForgeError):
    """The zero profile cannot be scaled onto a flux sphere."""


class UndefinedMultiplierError(VortexForgeError):
    pass


class SolverFailureError(VortexForgeError):
    pass


class SingularSystemError(SolverFailureError):
    pass


class PathDegenerationError(SolverFailureError):
    """The mountain-pass maximizer collapsed toward the origin."""


class FitUndefinedError(VortexForgeError):
    """Log-linear tail fit impossible because the tail is not strictly positive."""
