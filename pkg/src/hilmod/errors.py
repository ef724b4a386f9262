"""Exception hierarchy shared by every module.

Exit-code classes used by the CLI:

* :class:`ConfigError` and argument errors -> 2
* :class:`NumericalAnomaly` subclasses -> 3
* :class:`TruncationError` subclasses -> 4
"""


class HilmodError(Exception):
    """Base class for all library errors."""


class ArgumentError(HilmodError, ValueError):
    """Bad argument: wrong dimension, out-of-range index, invalid parameter."""


class DomainError(ArgumentError):
    """Point outside the open polydisc (or another admissible region)."""


class NotInModuleError(ArgumentError):
    """Monomial or polynomial not contained in the truncated module."""


class UnsupportedError(HilmodError):
    """Requested computation lies outside the supported (monomial) setting."""


class InvalidWitnessError(ArgumentError):
    """A polynomial presented as a unit vanishes at the base point."""


class ConfigError(HilmodError):
    """Job configuration failed to parse or validate."""


class NumericalAnomaly(HilmodError):
    """Result could not be certified at the requested tolerance."""


class DegenerateModuleError(NumericalAnomaly):
    """Stacked operator is identically zero."""


class IllSeparatedKernelError(NumericalAnomaly):
    """Singular values cluster around the rank threshold."""


class DegenerateFrameError(NumericalAnomaly):
    """Gram matrix of the frame at the base point is singular."""


class OnVarietyError(NumericalAnomaly):
    """Kernel vector vanishes at the requested point."""


class OutOfRadiusError(NumericalAnomaly):
    """Point lies outside the convergence ball of the frame series."""


class TruncationError(HilmodError):
    """Truncation degree is too small for the requested computation."""


class TruncationTooSmallError(TruncationError, ArgumentError):
    """Truncation degree below the largest generator degree."""


class TruncationStarvationError(TruncationError):
    """Computed vectors carry non-negligible mass near the truncation degree."""
