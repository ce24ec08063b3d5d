"""Exception hierarchy shared by all modules."""


class NumericalError(RuntimeError):
    """Base class for failures of a numerical procedure (CLI exit code 3)."""


class EigenvalueError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    """Newton iteration did not reach the residual tolerance.

    Carries the best iterate seen and the residual-norm history.
    """

    def __init__(self, message, best_iterate=None, history=()):
        super().__init__(message)
        self.best_iterate = best_iterate
        self.history = list(history)


class SingularJacobianError(NumericalError):
    def __init__(self, message, iterate=None):
        super().__init__(message)
        self.iterate = iterate


class SingularConfigurationError(NumericalError, ValueError):
    """Charges coincide or sit on a pole of the external field."""


class CurveError(NumericalError, ValueError):
    """Integration contour is unusable (non-finite sample, pole too close, wrong enclosure)."""


class ModelFitError(NumericalError):
    pass


class PreconditionError(ValueError):
    """An operation was called outside its stated domain."""
