"""Exception types shared across the library."""


class UlbkitError(Exception):
    """Base class for all ulbkit errors."""


class ParameterError(UlbkitError, ValueError):
    """Invalid space, potential, or query parameters."""


class DegreeOverflowError(UlbkitError):
    """Polynomial degree beyond what a finite space can represent."""


class DomainError(UlbkitError, ValueError):
    """Evaluation outside a function's domain (e.g. a singular potential at t=1)."""


class ConvergenceError(UlbkitError):
    """An iterative solve failed to reach its tolerance."""


class MonotonicityError(UlbkitError):
    """A potential failed a required absolute-monotonicity check."""


class ConditionError(UlbkitError):
    """A bound-certificate condition failed.

    ``where`` carries the failing coefficient index or grid point.
    """

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where
