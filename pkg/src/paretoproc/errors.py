"""Exception and warning types shared across the package."""


class ParetoProcError(Exception):
    """Base class for all package-specific errors."""


class GridMismatch(ParetoProcError):
    """Operands live on different grids."""


class DomainError(ParetoProcError):
    """Componentwise operation evaluated outside its mathematical domain."""


class SpecGridMismatch(ParetoProcError):
    """Profile specification is incompatible with the grid (e.g. a two-site
    family asked to sample on a grid of a different size)."""


class ZeroField(ParetoProcError):
    """Spectral decomposition of an identically-zero field."""


class NonPositiveArgument(ParetoProcError):
    """A formula requiring a strictly positive argument field received zeros."""


class OutOfSupport(ParetoProcError):
    """Argument lies outside the support of the generalized Pareto family."""


class PreconditionFailed(ParetoProcError):
    """A Monte Carlo pre-test required by the operation failed."""


class InsufficientData(ParetoProcError):
    """Order-statistic level k incompatible with the sample size."""


class DegenerateTail(ParetoProcError):
    """Top order statistics at some site are degenerate (tied or nonpositive),
    so tail estimation is undefined there."""


class OutOfSupportWarning(UserWarning):
    """Out-of-support values were clamped to 0 by the positive-part convention."""
