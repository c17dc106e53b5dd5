"""Exception types shared by the solver modules."""


class VortexlabError(Exception):
    """Base class for all vortexlab errors."""


class NonConvergenceError(VortexlabError):
    """An iterative solve ended without meeting its tolerance.

    Carries enough diagnostics to decide whether to retry with a better
    initial guess, a finer mesh, or a larger iteration budget.
    """

    def __init__(self, message, iterations=None, residual=None, last_iterate=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual
        self.last_iterate = last_iterate


class FieldOverflowError(VortexlabError):
    """A field drove an exponent argument past the configured cap.

    This signals divergence of an outer iteration, not a rounding issue:
    the minimizers of the functional live at O(1) amplitudes.
    """
