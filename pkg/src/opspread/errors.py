"""Exception types shared across the package."""


class OpspreadError(Exception):
    """Base class for package errors."""


class InvalidDimensionError(OpspreadError):
    """Local dimension or matrix shape is unusable."""


class BudgetExceededError(OpspreadError):
    """Requested computation does not fit the dense-matrix budget."""


class InsufficientWindowError(OpspreadError):
    """Fewer than three usable time points survive the fit window."""


class DivergentSeriesError(OpspreadError):
    """An infinite sum was requested outside its region of convergence."""


class NonConvergenceError(OpspreadError):
    """An iterative sum failed to reach tolerance in the allowed terms."""


class SingularResolventError(OpspreadError):
    """A resolvent solve hit a (numerically) singular shift."""


class InvalidConfigError(OpspreadError):
    """Experiment configuration failed validation."""


class MissingSeriesError(OpspreadError):
    """A plot was requested for a series the record does not contain."""
