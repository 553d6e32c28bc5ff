"""Exception types shared across the package."""


class StructureError(ValueError):
    """A clone structure (or something built on it) is malformed or invalid."""


class AddressError(StructureError):
    """A clone address uses unknown ids or breaks the chaining rule."""


class NotIrreducibleError(ValueError):
    """The operation needs an irreducible matrix and did not get one."""


class ConvergenceError(RuntimeError):
    """An iteration ran out of budget; ``best`` holds the last iterate."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class CapExceededError(ValueError):
    """A combinatorial or depth cap was exceeded."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate
