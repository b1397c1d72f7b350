"""Exception and warning types shared across the package."""


class InputError(ValueError):
    """An argument violates an operation's contract (bad shape, not PD, ...)."""


class NumericalFailure(RuntimeError):
    """An iterative kernel failed to reach its residual tolerance."""


class ToleranceNotMet(RuntimeError):
    """Adaptive quadrature exhausted its subdivision budget.

    The partial result is still available on the ``result`` attribute,
    with ``result.converged`` set to False.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class IllConditionedWarning(RuntimeWarning):
    """A positive-definite input has condition number above 1e12.

    Computation proceeds; results may lose accuracy.
    """
