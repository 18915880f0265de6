"""Exception types shared by every model module."""


class DomainError(ValueError):
    """Inputs fall outside the region where a model or formula is defined."""


class ConvergenceError(RuntimeError):
    """An iterative numerical routine gave up before meeting its tolerance.

    The best estimate reached so far and its error bound are kept on the
    exception so callers can decide whether the value is still usable.
    """

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(f"{message} (estimate={estimate!r}, error bound={error!r})")
        self.estimate = estimate
        self.error = error
