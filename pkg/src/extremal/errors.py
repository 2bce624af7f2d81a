"""Exception types shared across the package."""


class InvalidParam(ValueError):
    """A numeric parameter lies outside the domain of the operation."""


class DegenerateFactor(ArithmeticError):
    """A factor of a product vanished exactly, so its logarithm is undefined."""

    def __init__(self, message, indices):
        super().__init__(message)
        self.indices = tuple(indices)


class PoleProximity(ArithmeticError):
    """An evaluation point sits on (or numerically at) a pole."""


class NoConvergence(RuntimeError):
    """Adaptive refinement exhausted its budget without meeting the tolerance."""


class BoundViolation(ArithmeticError):
    """A computed product exceeded the proven upper bound.

    Raised by runtime rails; it means either an implementation bug or a
    counterexample candidate, and callers should surface it loudly.
    """
