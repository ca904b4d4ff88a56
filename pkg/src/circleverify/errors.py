"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """An input violates an operation's precondition (e.g. sieve too small)."""


class SizeCapError(ValueError):
    """A request exceeds a fixed size cap (memory, degree, oracle budget)."""


class QuadratureError(RuntimeError):
    """Panel quadrature failed to converge after the maximum refinement."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history or [])
