"""Exception types raised by the numerical routines."""


class SubdiffError(Exception):
    """Base class for all package errors."""


class PoleError(SubdiffError, ValueError):
    """Gamma function evaluated at a non-positive integer."""


class ConvergenceError(SubdiffError, ArithmeticError):
    """A series or quadrature did not reach its tolerance.

    ``achieved`` carries the best error estimate that was reached.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class PathBudgetError(SubdiffError, RuntimeError):
    """A simulated subordinator path failed to cross the target time."""


class StabilityError(SubdiffError, ValueError):
    """Explicit time step exceeds the stability bound.

    ``admissible_dt`` is the largest step that satisfies the bound.
    """

    def __init__(self, message, admissible_dt=None):
        super().__init__(message)
        self.admissible_dt = admissible_dt
